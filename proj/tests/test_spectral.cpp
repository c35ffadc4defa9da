#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mlr/am.hpp"
#include "mlr/linalg.hpp"
#include "mlr/metrics.hpp"
#include "mlr/spectral.hpp"

using namespace mlr;

namespace {

// largest principal angle between two orthonormal d x 2 bases via the
// singular values of B1^T B2 (closed form for the 2x2 cross product)
double largest_principal_angle(const Matrix& b1, const Matrix& b2) {
  double c[2][2] = {{0, 0}, {0, 0}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < b1.rows; ++i) c[a][b] += b1(i, a) * b2(i, b);
  const double t = c[0][0] * c[0][0] + c[0][1] * c[0][1] + c[1][0] * c[1][0] +
                   c[1][1] * c[1][1];
  const double det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
  const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det * det));
  const double smin_sq = std::max(0.0, (t - disc) / 2.0);
  const double smin = std::min(1.0, std::sqrt(smin_sq));
  return std::acos(smin);
}

}  // namespace

TEST_CASE("single-sample moment matrix is one outer product") {
  Instance inst;
  inst.X = Matrix(1, 2);
  inst.X(0, 0) = 2.0;
  inst.X(0, 1) = -1.0;
  inst.y = {3.0};
  const Matrix M = moment_matrix(inst);
  CHECK(M(0, 0) == 36.0);
  CHECK(M(0, 1) == -18.0);
  CHECK(M(1, 0) == -18.0);
  CHECK(M(1, 1) == 9.0);
}

TEST_CASE("moment matrix is exactly symmetric and PSD") {
  const GroundTruth gt = random_truth(2, 8, 0.1, 1);
  const Instance inst = sample_instance(gt, 100, 2);
  const Matrix M = moment_matrix(inst);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(M(i, j) == M(j, i));
  // PSD: every eigenvalue of -M is <= 1e-10, i.e. top of -M bounded
  Matrix neg(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) neg(i, j) = -M(i, j);
  const EigPairs e = top_k_eigpairs(neg, 1);
  CHECK(e.values[0] <= 1e-10);
}

TEST_CASE("moment matrix approaches its population value") {
  GroundTruth gt;
  gt.thetas = {{1.0, 0.0}, {0.0, 1.0}};
  gt.mixing = {0.5, 0.5};
  gt.sigma = 0.0;
  const Instance inst = sample_instance(gt, 100000, 3);
  const Matrix M = moment_matrix(inst);
  // population: sum_j p_j (|theta_j|^2 I + 2 theta_j theta_j^T) = 2 I
  CHECK(std::fabs(M(0, 0) - 2.0) < 0.1);
  CHECK(std::fabs(M(1, 1) - 2.0) < 0.1);
  CHECK(std::fabs(M(0, 1)) < 0.1);
}

TEST_CASE("subspace of a diagonal matrix") {
  Matrix M(3, 3);
  M(0, 0) = 5.0;
  M(1, 1) = 2.0;
  M(2, 2) = 1.0;
  const Matrix basis = init_subspace(M);
  // span{e1, e2}: the e3 coordinate of both columns vanishes
  CHECK(std::fabs(basis(2, 0)) < 1e-7);
  CHECK(std::fabs(basis(2, 1)) < 1e-7);
}

TEST_CASE("subspace recovery on planted regressors") {
  const int d = 20;
  const int n = 8000;
  GroundTruth gt;
  Vector t1(d, 0.0), t2(d, 0.0);
  t1[0] = 3.0;
  t2[1] = 3.0;
  gt.thetas = {t1, t2};
  gt.mixing = {0.5, 0.5};
  gt.sigma = 0.0;
  const Instance inst = sample_instance(gt, n, 4);
  const Matrix basis = init_subspace(moment_matrix(inst));
  Matrix truth_basis(d, 2);
  truth_basis(0, 0) = 1.0;
  truth_basis(1, 1) = 1.0;
  CHECK(largest_principal_angle(basis, truth_basis) <= 0.2);
}

TEST_CASE("subspace error shrinks with the sample size") {
  const int d = 20;
  GroundTruth gt;
  Vector t1(d, 0.0), t2(d, 0.0);
  t1[0] = 3.0;
  t2[1] = 3.0;
  gt.thetas = {t1, t2};
  gt.mixing = {0.5, 0.5};
  gt.sigma = 0.0;
  Matrix truth_basis(d, 2);
  truth_basis(0, 0) = 1.0;
  truth_basis(1, 1) = 1.0;
  double prev = 10.0;
  for (int n : {500, 4000, 32000}) {
    const Instance inst = sample_instance(gt, n, 4);
    const double a =
        largest_principal_angle(init_subspace(moment_matrix(inst)), truth_basis);
    CHECK(a < prev);
    prev = a;
  }
  CHECK(prev <= 0.1);
}

TEST_CASE("two-dimensional data recovers the full plane") {
  const GroundTruth gt = random_truth(2, 2, 0.0, 5);
  const Instance inst = sample_instance(gt, 200, 6);
  const Matrix basis = init_subspace(moment_matrix(inst));
  Matrix eye(2, 2);
  eye(0, 0) = 1.0;
  eye(1, 1) = 1.0;
  CHECK(largest_principal_angle(basis, eye) <= 1e-6);
}

TEST_CASE("a grid containing the truth returns the truth") {
  // truth inside span{e1, e2} with coefficients on the grid lattice
  const int d = 6;
  GroundTruth gt;
  Vector t1(d, 0.0), t2(d, 0.0);
  t1[0] = 1.0;
  t2[1] = -0.5;
  gt.thetas = {t1, t2};
  gt.mixing = {0.5, 0.5};
  gt.sigma = 0.0;
  const Instance inst = sample_instance(gt, 150, 7);
  Matrix basis(d, 2);
  basis(0, 0) = 1.0;
  basis(1, 1) = 1.0;
  GridSpec grid;
  grid.points_per_axis = 9;  // lattice {-2,-1.5,...,2} contains 1 and -0.5
  grid.radius = 2.0;
  const ParamSet best = grid_init(inst, basis, grid);
  ParamSet truth;
  truth.thetas = gt.thetas;
  CHECK(dist(best, truth) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(loss(inst, best) == 0.0);
}

TEST_CASE("refining the grid never hurts the loss") {
  const GroundTruth gt = random_truth(2, 5, 0.1, 8);
  const Instance inst = sample_instance(gt, 120, 9);
  const Matrix basis = init_subspace(moment_matrix(inst));
  GridSpec coarse;
  coarse.points_per_axis = 11;
  coarse.radius = default_grid(inst).radius;
  GridSpec fine = coarse;
  fine.points_per_axis = 21;  // same endpoints, superset of points
  const double lc = loss(inst, grid_init(inst, basis, coarse));
  const double lf = loss(inst, grid_init(inst, basis, fine));
  CHECK(lf <= lc + 1e-12 * (1.0 + lc));
}

TEST_CASE("grid minimizer lands within a cell of projected truth") {
  const int d = 10;
  GroundTruth gt;
  Vector t1(d, 0.0), t2(d, 0.0);
  t1[0] = 1.3;
  t1[1] = -0.4;
  t2[0] = -0.7;
  t2[1] = 0.9;
  gt.thetas = {t1, t2};
  gt.mixing = {0.5, 0.5};
  gt.sigma = 0.0;
  const Instance inst = sample_instance(gt, 600, 10);
  Matrix basis(d, 2);
  basis(0, 0) = 1.0;
  basis(1, 1) = 1.0;
  GridSpec grid;
  grid.points_per_axis = 41;
  double maxproj = 0.0;
  for (const auto& th : gt.thetas)
    maxproj = std::max(maxproj, std::sqrt(th[0] * th[0] + th[1] * th[1]));
  grid.radius = 1.5 * maxproj;
  const ParamSet best = grid_init(inst, basis, grid);
  ParamSet truth;
  truth.thetas = gt.thetas;
  const double cell = 2.0 * grid.radius / (grid.points_per_axis - 1);
  CHECK(dist(best, truth) <= cell * std::sqrt(2.0));
}

TEST_CASE("pipeline smoke test: spectral init feeds a convergent run") {
  const GroundTruth gt = random_truth(2, 8, 0.0, 11);
  const Instance inst = sample_instance(gt, 480, 12);
  GridSpec grid;
  grid.points_per_axis = 21;
  grid.radius = default_grid(inst).radius;
  const ParamSet init = spectral_init(inst, &grid);
  AmConfig cfg;
  cfg.max_rounds = 20;
  const Trace tr = run_am(inst, init, cfg);
  CHECK(tr.dist_to_truth.back() <= 1e-6);
}
