#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlr/datagen.hpp"

namespace mlr {

struct AmConfig {
  int max_rounds = 10;
  bool sample_split = false;  // one disjoint sample group per round
  double tol = 1e-12;         // stop when max_j |theta_j' - theta_j| < tol
  bool track_truth = true;    // record dist to truth when the instance has one
  uint64_t split_seed = 0;    // permutation seed for sample splitting
};

struct TraceDiagnostics {
  int empty_cluster_events = 0;
  int rank_deficient_events = 0;
  bool diverged = false;
};

/// Per-iteration record of a solver run. iterates[0] is the
/// initialization; wall_clock_per_iter[t] times the round producing
/// iterates[t+1] (label assignment + update only, bookkeeping excluded).
struct Trace {
  std::vector<ParamSet> iterates;
  std::vector<double> dist_to_truth;  // empty unless tracked
  std::vector<double> loss_seq;       // full-sample loss, one per iterate
  std::vector<int> labels_final;
  std::vector<double> wall_clock_per_iter;  // seconds
  std::optional<int> converged_at;
  TraceDiagnostics diagnostics;
};

/// Seeded random permutation of [n] cut into T disjoint groups of size
/// floor(n/T); the n mod T trailing samples are discarded.
std::vector<Instance> split_samples(const Instance& inst, int T, uint64_t seed);

/// z_i = argmin_j |y_i - <x_i, theta_j>|, ties to the smallest index.
std::vector<int> assign_labels(const Instance& inst, const ParamSet& params);

/// Per-component least squares on the assigned rows; a component with no
/// assigned samples keeps its previous value. Empty clusters and rank
/// deficiency are reported through `diag`, never thrown.
ParamSet refit(const Instance& inst, const std::vector<int>& labels, int K,
               const ParamSet& prev, TraceDiagnostics* diag = nullptr);

/// Alternating minimization: assign labels, refit, repeat for up to
/// max_rounds. With sample_split, round t runs on group t; the loss
/// trace is always evaluated on the full sample.
Trace run_am(const Instance& inst, const ParamSet& init, const AmConfig& cfg);

/// CSV with header `iter,dist,loss,wall_clock_s` (dist left empty when
/// not tracked).
void write_trace_csv(const Trace& trace, const std::string& path);

/// Reads the dist column back from a trace CSV.
std::vector<double> read_trace_dist_csv(const std::string& path);

}  // namespace mlr
