#pragma once

#include <optional>

#include "mlr/am.hpp"

namespace mlr {

struct GdConfig {
  double gamma = 0.0;
  int max_rounds = 500;
  double tol = 0.0;  // 0 disables the movement stop
  std::optional<double> target_precision;  // stop when dist-to-truth <= target
};

/// theta_j' = theta_j - gamma * sum_{i: z_i = j} 2 (<x_i, theta_j> - y_i) x_i.
/// Full gradient of the per-cluster squared loss, summed (not averaged);
/// the step-size tuner absorbs the n-dependent scale.
ParamSet gd_step(const Instance& inst, const ParamSet& params,
                 const std::vector<int>& labels, double gamma);

/// Gradient heuristic: assign labels (shared with the AM solver), take a
/// gradient step, repeat. No sample splitting. Sets diagnostics.diverged
/// and stops when the loss exceeds 1e6 x the initial loss.
Trace run_gd(const Instance& inst, const ParamSet& init, const GdConfig& cfg);

/// Geometric step-size search: starting from 1/(4n), double gamma while
/// a probe run of `probe_rounds` iterations keeps the loss non-increasing
/// and does not diverge; returns the largest passing gamma. Throws
/// NoStableStep when even the initial gamma fails.
double tune_step_size(const Instance& inst, const ParamSet& init, int probe_rounds);

}  // namespace mlr
