#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mlr/am.hpp"
#include "mlr/linalg.hpp"
#include "mlr/metrics.hpp"

using namespace mlr;

namespace {

ParamSet params_of(const GroundTruth& gt) {
  ParamSet p;
  p.thetas = gt.thetas;
  return p;
}

}  // namespace

TEST_CASE("dist basics") {
  const GroundTruth gt = random_truth(2, 6, 0.0, 1);
  const ParamSet truth = params_of(gt);
  CHECK(dist(truth, truth) == 0.0);

  ParamSet swapped;
  swapped.thetas = {gt.thetas[1], gt.thetas[0]};
  CHECK(dist(swapped, truth) == 0.0);

  ParamSet bumped = truth;
  bumped.thetas[0][0] += 0.3;
  CHECK(dist(bumped, truth) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("dist is symmetric and permutation invariant") {
  const ParamSet a = params_of(random_truth(3, 5, 0.0, 2));
  const ParamSet b = params_of(random_truth(3, 5, 0.0, 3));
  CHECK(dist(a, b) == doctest::Approx(dist(b, a)).epsilon(1e-14));

  ParamSet ap, bp;  // common permutation (2,0,1) applied to both
  ap.thetas = {a.thetas[2], a.thetas[0], a.thetas[1]};
  bp.thetas = {b.thetas[2], b.thetas[0], b.thetas[1]};
  CHECK(dist(ap, bp) == doctest::Approx(dist(a, b)).epsilon(1e-14));
}

TEST_CASE("dist rejects mismatched shapes") {
  const ParamSet a = params_of(random_truth(2, 4, 0.0, 2));
  const ParamSet b = params_of(random_truth(2, 5, 0.0, 2));
  CHECK_THROWS_AS(dist(a, b), DimensionMismatch);
}

TEST_CASE("loss is zero exactly at a perfect fit") {
  const GroundTruth gt = random_truth(2, 5, 0.0, 4);
  const Instance inst = sample_instance(gt, 80, 5);
  CHECK(loss(inst, params_of(gt)) == 0.0);
}

TEST_CASE("single-component loss equals the plain residual sum") {
  const GroundTruth gt = random_truth(1, 4, 0.3, 6);
  const Instance inst = sample_instance(gt, 30, 7);
  ParamSet p;
  p.thetas = {Vector(4, 0.25)};
  double expected = 0.0;
  for (int i = 0; i < 30; ++i) {
    const double r = inst.y[i] - dot(inst.X.row(i), p.thetas[0].data(), 4);
    expected += r * r;
  }
  CHECK(loss(inst, p) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("loss matches enumeration over all label vectors") {
  const GroundTruth gt = random_truth(2, 3, 0.2, 8);
  const Instance inst = sample_instance(gt, 10, 9);
  const ParamSet p = params_of(random_truth(2, 3, 0.0, 10));

  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << 10); ++mask) {
    double total = 0.0;
    for (int i = 0; i < 10; ++i) {
      const int j = (mask >> i) & 1;
      const double r = inst.y[i] - dot(inst.X.row(i), p.thetas[j].data(), 3);
      total += r * r;
    }
    best = std::min(best, total);
  }
  CHECK(loss(inst, p) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("loss is invariant under permuting components") {
  const GroundTruth gt = random_truth(3, 4, 0.1, 11);
  const Instance inst = sample_instance(gt, 25, 12);
  const ParamSet p = params_of(random_truth(3, 4, 0.0, 13));
  ParamSet q;
  q.thetas = {p.thetas[2], p.thetas[0], p.thetas[1]};
  CHECK(loss(inst, p) == doctest::Approx(loss(inst, q)).epsilon(1e-14));
}

TEST_CASE("mismatch set is empty at the truth") {
  const GroundTruth gt = random_truth(2, 10, 0.0, 14);
  const Instance inst = sample_instance(gt, 200, 15);
  const MismatchReport rep = mismatch_set(inst, params_of(gt));
  CHECK(rep.size == 0);
  CHECK(rep.indices.empty());
  CHECK(rep.dist_at_eval == 0.0);

  for (uint64_t seed = 30; seed < 40; ++seed) {
    const GroundTruth g = random_truth(2, 4 + static_cast<int>(seed % 5), 0.0, seed);
    const Instance in = sample_instance(g, 60, seed + 1);
    CHECK(mismatch_set(in, params_of(g)).size == 0);
  }
}

TEST_CASE("mismatch set swallows the whole second cluster when forced") {
  // first estimate sits exactly on theta*_2: every true-2 sample has a
  // zero residual against it, so the strict inequality always holds
  const GroundTruth gt = random_truth(2, 6, 0.0, 16);
  const Instance inst = sample_instance(gt, 120, 17);
  ParamSet p;
  Vector off = gt.thetas[1];
  off[0] += 0.8;
  p.thetas = {gt.thetas[1], off};
  const MismatchReport rep = mismatch_set(inst, p);
  int true2 = 0;
  for (int v : inst.z) true2 += v == 1;
  CHECK(rep.size == true2);
}

TEST_CASE("mismatch set matches index-by-index enumeration") {
  const GroundTruth gt = random_truth(2, 4, 0.1, 18);
  const Instance inst = sample_instance(gt, 10, 19);
  const ParamSet p = params_of(random_truth(2, 4, 0.0, 20));
  const MismatchReport rep = mismatch_set(inst, p);
  std::vector<int> expected;
  for (int i = 0; i < 10; ++i) {
    const double r1 = inst.y[i] - dot(inst.X.row(i), p.thetas[0].data(), 4);
    const double r2 = inst.y[i] - dot(inst.X.row(i), p.thetas[1].data(), 4);
    if (r1 * r1 < r2 * r2 && inst.z[i] == 1) expected.push_back(i);
  }
  CHECK(rep.indices == expected);
}

TEST_CASE("mismatch set error paths") {
  const GroundTruth gt = random_truth(3, 4, 0.0, 21);
  const Instance inst = sample_instance(gt, 10, 22);
  CHECK_THROWS_AS(mismatch_set(inst, params_of(gt)), UnsupportedK);

  const GroundTruth gt2 = random_truth(2, 4, 0.0, 23);
  Instance nolabels = sample_instance(gt2, 10, 24);
  nolabels.z.clear();
  CHECK_THROWS_AS(mismatch_set(nolabels, params_of(gt2)), MissingLabels);
}

TEST_CASE("exponent fit recovers geometric decay") {
  std::vector<double> seq;
  for (int t = 0; t < 30; ++t) seq.push_back(std::pow(0.5, t));
  const RateFit fit = fit_convergence_exponent(seq, {1e-12, 10.0});
  CHECK(std::fabs(fit.slope - 1.0) < 1e-9);
  CHECK(std::fabs(fit.intercept - std::log(0.5)) < 1e-9);
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exponent fit recovers quadratic recursion") {
  std::vector<double> seq{0.5};
  for (int t = 0; t < 7; ++t) seq.push_back(seq.back() * seq.back());
  const RateFit fit = fit_convergence_exponent(seq, {1e-300, 10.0});
  CHECK(std::fabs(fit.slope - 2.0) < 1e-9);
}

TEST_CASE("exponent fit recovers a synthetic power recursion exactly") {
  std::vector<double> seq{0.9};
  for (int t = 0; t < 12; ++t) seq.push_back(0.8 * std::pow(seq.back(), 1.5));
  const RateFit fit = fit_convergence_exponent(seq, {1e-100, 10.0});
  CHECK(std::fabs(fit.slope - 1.5) < 1e-9);
  CHECK(std::fabs(fit.intercept - std::log(0.8)) < 1e-9);
  CHECK(std::fabs(fit.r_squared - 1.0) < 1e-9);
  CHECK(fit.points_used == 12);
}

TEST_CASE("exponent fit rejects starved windows") {
  CHECK_THROWS_AS(fit_convergence_exponent({0.5, 0.25}, {1e-9, 1.0}),
                  InsufficientPoints);
  // constant sequence: admissible pairs exist but carry no spread
  CHECK_THROWS_AS(fit_convergence_exponent({0.5, 0.5, 0.5, 0.5}, {1e-9, 1.0}),
                  InsufficientPoints);
}

TEST_CASE("window bounds are exclusive") {
  std::vector<double> seq{1.0, 0.5, 0.25, 0.125};
  // 1.0 sits on the upper bound and must be excluded
  const RateFit fit = fit_convergence_exponent(seq, {1e-9, 1.0});
  CHECK(fit.points_used == 2);
}

TEST_CASE("optimization error against the final iterate ends at zero") {
  const GroundTruth gt = random_truth(2, 20, 0.1, 25);
  const Instance inst = sample_instance(gt, 120, 26);
  AmConfig cfg;
  cfg.max_rounds = 50;
  const Trace tr = run_am(inst, perturbed_init(gt, boundary_radius(gt, 120), 27), cfg);
  const std::vector<double> err = optimization_error_seq(tr.iterates, tr.iterates.back());
  REQUIRE(!err.empty());
  CHECK(err.back() == 0.0);
  // strictly decreasing until the numerical floor
  for (size_t t = 0; t + 1 < err.size(); ++t)
    if (err[t] > 1e-9) CHECK(err[t + 1] < err[t]);
}

TEST_CASE("optimization error against the truth is the dist sequence") {
  const GroundTruth gt = random_truth(2, 15, 0.0, 28);
  const Instance inst = sample_instance(gt, 90, 29);
  AmConfig cfg;
  cfg.max_rounds = 15;
  const Trace tr = run_am(inst, perturbed_init(gt, boundary_radius(gt, 90), 30), cfg);
  ParamSet truth;
  truth.thetas = gt.thetas;
  const std::vector<double> err = optimization_error_seq(tr.iterates, truth);
  REQUIRE(err.size() == tr.dist_to_truth.size());
  for (size_t t = 0; t < err.size(); ++t)
    CHECK(err[t] == doctest::Approx(tr.dist_to_truth[t]).epsilon(1e-14));
}
