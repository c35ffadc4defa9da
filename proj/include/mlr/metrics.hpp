#pragma once

#include <utility>
#include <vector>

#include "mlr/datagen.hpp"

namespace mlr {

/// Fitted log-log convergence exponent with diagnostics.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  std::pair<double, double> window{0.0, 0.0};
};

/// Samples truly generated by component 2 but currently assigned to
/// component 1.
struct MismatchReport {
  std::vector<int> indices;
  int size = 0;
  double dist_at_eval = 0.0;  // NaN when the instance carries no truth
};

/// min over component permutations of max_j |est_{pi(j)} - ref_j|.
/// Coincides with the plain per-component maximum whenever the identity
/// matching is optimal; permutations are enumerated exactly.
double dist(const ParamSet& est, const ParamSet& ref);
double dist(const ParamSet& est, const GroundTruth& truth);

/// sum_i min_j (y_i - <x_i, theta_j>)^2.
double loss(const Instance& inst, const ParamSet& params);

/// K = 2 only. indices = { i : (y_i - <x_i,theta_1>)^2 < (y_i - <x_i,theta_2>)^2
/// and z_i = 1 }; ties on the residuals are excluded (strict inequality).
MismatchReport mismatch_set(const Instance& inst, const ParamSet& params);

/// Ordinary least-squares line through the points (ln d_t, ln d_{t+1})
/// over consecutive t where both values lie strictly inside `window`
/// and are positive. Slope 1 means linear convergence, slope alpha > 1
/// means error ~ dist^alpha per step.
RateFit fit_convergence_exponent(const std::vector<double>& dist_seq,
                                 std::pair<double, double> window);

/// Per-iterate permutation-matched distance to a fixed reference
/// (typically the final iterate of a noisy run).
std::vector<double> optimization_error_seq(const std::vector<ParamSet>& iterates,
                                           const ParamSet& reference);

}  // namespace mlr
