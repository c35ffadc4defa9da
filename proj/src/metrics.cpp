#include "mlr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlr/linalg.hpp"

namespace mlr {

double dist(const ParamSet& est, const ParamSet& ref) {
  const int K = est.k();
  if (K != ref.k() || est.dim() != ref.dim() || K == 0)
    throw DimensionMismatch("dist: parameter sets do not match");
  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double m = 0.0;
    for (int j = 0; j < K; ++j)
      m = std::max(m, norm2_diff(est.thetas[perm[j]], ref.thetas[j]));
    best = std::min(best, m);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double dist(const ParamSet& est, const GroundTruth& truth) {
  ParamSet ref;
  ref.thetas = truth.thetas;
  return dist(est, ref);
}

double loss(const Instance& inst, const ParamSet& params) {
  const int K = params.k();
  const int d = inst.dim();
  if (K == 0 || params.dim() != d)
    throw DimensionMismatch("loss: parameter dimension does not match instance");
  double total = 0.0;
  for (int i = 0; i < inst.n(); ++i) {
    const double* xi = inst.X.row(i);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < K; ++j) {
      const double r = inst.y[i] - dot(xi, params.thetas[j].data(), d);
      best = std::min(best, r * r);
    }
    total += best;
  }
  return total;
}

MismatchReport mismatch_set(const Instance& inst, const ParamSet& params) {
  if (params.k() != 2) throw UnsupportedK("mismatch_set: requires exactly 2 components");
  const int d = inst.dim();
  if (params.dim() != d)
    throw DimensionMismatch("mismatch_set: parameter dimension does not match instance");
  if (static_cast<int>(inst.z.size()) != inst.n())
    throw MissingLabels("mismatch_set: instance carries no latent labels");

  MismatchReport rep;
  for (int i = 0; i < inst.n(); ++i) {
    if (inst.z[i] != 1) continue;
    const double* xi = inst.X.row(i);
    const double r1 = inst.y[i] - dot(xi, params.thetas[0].data(), d);
    const double r2 = inst.y[i] - dot(xi, params.thetas[1].data(), d);
    if (r1 * r1 < r2 * r2) rep.indices.push_back(i);
  }
  rep.size = static_cast<int>(rep.indices.size());
  rep.dist_at_eval = inst.truth ? dist(params, *inst.truth)
                                : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

RateFit fit_convergence_exponent(const std::vector<double>& dist_seq,
                                 std::pair<double, double> window) {
  const auto [lo, hi] = window;
  std::vector<double> xs, ys;
  for (size_t t = 0; t + 1 < dist_seq.size(); ++t) {
    const double a = dist_seq[t], b = dist_seq[t + 1];
    if (a > lo && a < hi && b > lo && b < hi && a > 0.0 && b > 0.0) {
      xs.push_back(std::log(a));
      ys.push_back(std::log(b));
    }
  }
  const int m = static_cast<int>(xs.size());
  if (m < 2) throw InsufficientPoints("fit_convergence_exponent: fewer than 2 admissible pairs");

  double xm = 0.0, ym = 0.0;
  for (int i = 0; i < m; ++i) {
    xm += xs[i];
    ym += ys[i];
  }
  xm /= m;
  ym /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
    syy += (ys[i] - ym) * (ys[i] - ym);
  }
  if (sxx <= 0.0)
    throw InsufficientPoints("fit_convergence_exponent: admitted values are all identical");

  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  fit.r_squared = (syy <= 0.0) ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  fit.points_used = m;
  fit.window = window;
  return fit;
}

std::vector<double> optimization_error_seq(const std::vector<ParamSet>& iterates,
                                           const ParamSet& reference) {
  std::vector<double> out;
  out.reserve(iterates.size());
  for (const auto& it : iterates) out.push_back(dist(it, reference));
  return out;
}

}  // namespace mlr
