#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlr/am.hpp"
#include "mlr/gd.hpp"
#include "mlr/metrics.hpp"

namespace mlr::bench {

enum class Panel { fig3a, fig3b, fig3c, fig4a, fig4b, fig4c, table1, custom };

Panel panel_from_string(const std::string& name);
std::string to_string(Panel p);

enum class InitPolicy { perturbed, spectral };

struct ExperimentSpec {
  Panel panel = Panel::custom;
  std::vector<int> d_list{50};
  double n_over_d = 6.0;
  int K = 2;
  double sigma = 0.0;
  int trials = 20;
  uint64_t root_seed = 1;
  InitPolicy init = InitPolicy::perturbed;
  // "boundary", "boundary*<factor>", or a plain radius value.
  std::string init_radius_policy = "boundary";
  std::optional<double> target_precision;
  int max_rounds = 0;  // 0 = panel default

  void validate() const;  // throws InvalidSpec
};

ExperimentSpec default_spec(Panel p);
ExperimentSpec spec_from_json_file(const std::string& path);

/// Flattened spec fields plus per-trial results. iterations_to_target is
/// -1 when no target is set or the target was not reached.
struct RunRecord {
  std::string panel;
  int d = 0;
  int n = 0;
  int K = 0;
  double sigma = 0.0;
  int trial = 0;
  uint64_t seed = 0;
  std::string init;
  int iterations_to_target = -1;
  double wall_clock_s = 0.0;
  double fitted_slope = 0.0;
  double final_dist = 0.0;
};

struct PanelResult {
  std::vector<RunRecord> records;
  // Per d: trial-averaged error per iteration (traces shorter than the
  // longest are extended by their final value before averaging).
  std::vector<std::pair<int, std::vector<double>>> mean_curves;
  // Fit of each mean curve over the window (1e-9, initial value).
  std::vector<std::pair<int, RateFit>> curve_fits;
};

/// Per-trial seed; adding trials never changes earlier trials.
uint64_t trial_seed(uint64_t root_seed, int d, int trial);

/// Runs one panel. When out_dir is non-empty, writes
/// <panel>_records.csv, <panel>_curves.csv (`d,iter,mean_dist`),
/// <panel>_loglog.csv (`d,log_dist_t,log_dist_t1`, natural log) and a
/// <panel>_meta.json sidecar. Outputs are byte-identical across reruns
/// with the same spec and root seed, wall-clock columns excepted.
PanelResult run_panel(const ExperimentSpec& spec, const std::string& out_dir);

struct TableRow {
  int d = 0;
  std::string algorithm;  // "am" or "gd"
  double iterations = 0.0;  // median; -1 when no trial reached the target
  double wall_clock_s = 0.0;
};

/// Runs AM (no splitting) and tuned GD to the target precision on the
/// same instances and reports median iterations and median wall-clock
/// per d. Writes table1.csv (`d,algorithm,iterations,wall_clock_s`).
std::vector<TableRow> compare_table(const ExperimentSpec& spec, const std::string& out_dir);

struct Lemma1Result {
  std::vector<std::pair<double, double>> points;  // (dist, mean |S|/n)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Fixes one K=2 noiseless truth and one perturbed init per radius, then
/// measures the mean mismatch fraction |S|/n over freshly sampled
/// instances; fits a straight line through (radius, mean fraction).
/// Writes lemma1.csv (`dist,mean_frac_mismatch`).
Lemma1Result lemma1_sweep(int d, int n, const std::vector<double>& radii, int trials,
                          uint64_t seed, const std::string& out_dir);

}  // namespace mlr::bench
