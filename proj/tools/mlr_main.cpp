// Command-line benchmark harness for mixed linear regression: instance
// generation, single AM/GD runs, rate fitting and panel sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlr/bench.hpp"
#include "mlr/rng.hpp"
#include "mlr/spectral.hpp"

namespace {

using nlohmann::json;

struct RunArgs {
  int d = 50;
  int n = 300;
  int k = 2;
  double sigma = 0.0;
  uint64_t seed = 1;
  std::string init = "perturbed";
  std::string radius = "boundary";
  int rounds = 25;
  double tol = 1e-12;
  bool split = false;
  double gamma = 0.0;  // 0 = tune
  std::string out = "trace.csv";
};

void add_run_options(CLI::App* cmd, RunArgs& a, bool is_am) {
  cmd->add_option("--d", a.d, "dimension");
  cmd->add_option("--n", a.n, "sample count");
  cmd->add_option("--k", a.k, "number of components");
  cmd->add_option("--sigma", a.sigma, "noise standard deviation");
  cmd->add_option("--seed", a.seed, "root seed");
  cmd->add_option("--init", a.init, "perturbed|spectral")
      ->check(CLI::IsMember({"perturbed", "spectral"}));
  cmd->add_option("--radius", a.radius, "boundary, boundary*<f>, or a value");
  cmd->add_option("--rounds", a.rounds, "maximum rounds");
  cmd->add_option("--tol", a.tol, "movement stopping tolerance");
  if (is_am) cmd->add_flag("--split", a.split, "one disjoint sample group per round");
  else cmd->add_option("--gamma", a.gamma, "step size (default: tuned)");
  cmd->add_option("--out", a.out, "trace CSV path (metadata sidecar: <out>.json)");
}

struct PreparedRun {
  mlr::Instance inst;
  mlr::ParamSet init;
  double radius_used = 0.0;
};

PreparedRun prepare_run(const RunArgs& a) {
  const mlr::GroundTruth truth =
      mlr::random_truth(a.k, a.d, a.sigma, mlr::rng::derive(a.seed, 11));
  PreparedRun p;
  p.inst = mlr::sample_instance(truth, a.n, mlr::rng::derive(a.seed, 12));
  if (a.init == "spectral") {
    if (a.k != 2) throw mlr::InvalidSpec("spectral init supports K = 2 only");
    p.init = mlr::spectral_init(p.inst);
  } else {
    double r = 0.0;
    try {
      if (a.radius == "boundary") {
        r = mlr::boundary_radius(truth, a.n);
      } else if (a.radius.rfind("boundary*", 0) == 0) {
        r = std::stod(a.radius.substr(9)) * mlr::boundary_radius(truth, a.n);
      } else {
        r = std::stod(a.radius);
      }
    } catch (const mlr::Error&) {
      throw;
    } catch (const std::exception&) {
      throw mlr::InvalidSpec("cannot parse --radius '" + a.radius + "'");
    }
    p.radius_used = r;
    p.init = mlr::perturbed_init(truth, r, mlr::rng::derive(a.seed, 13));
  }
  return p;
}

void write_run_sidecar(const RunArgs& a, const PreparedRun& p, const mlr::Trace& tr,
                       std::optional<double> gamma_used) {
  json j;
  j["seed"] = a.seed;
  j["d"] = a.d;
  j["n"] = a.n;
  j["K"] = a.k;
  j["sigma"] = a.sigma;
  j["init"] = a.init;
  if (a.init == "perturbed") j["radius"] = p.radius_used;
  j["rounds"] = a.rounds;
  j["tol"] = a.tol;
  j["sample_split"] = a.split;
  if (gamma_used) j["gamma"] = *gamma_used;
  if (tr.converged_at) j["converged_at"] = *tr.converged_at;
  j["diverged"] = tr.diagnostics.diverged;
  j["empty_cluster_events"] = tr.diagnostics.empty_cluster_events;
  j["rank_deficient_events"] = tr.diagnostics.rank_deficient_events;
  std::ofstream out(a.out + ".json", std::ios::binary);
  if (!out) throw mlr::Error("cannot open " + a.out + ".json for writing");
  out << j.dump(2) << "\n";
}

void apply_spec_overrides(mlr::bench::ExperimentSpec& spec, const CLI::App* cmd,
                          const std::vector<int>& d_list, double n_over_d, double sigma,
                          int trials, uint64_t seed, const std::string& init, int rounds,
                          int K) {
  if (cmd->count("--d") > 0) spec.d_list = d_list;
  if (cmd->count("--n-over-d") > 0) spec.n_over_d = n_over_d;
  if (cmd->count("--sigma") > 0) spec.sigma = sigma;
  if (cmd->count("--trials") > 0) spec.trials = trials;
  if (cmd->count("--seed") > 0) spec.root_seed = seed;
  if (cmd->count("--rounds") > 0) spec.max_rounds = rounds;
  if (cmd->count("--k") > 0) spec.K = K;
  if (cmd->count("--init") > 0)
    spec.init = init == "spectral" ? mlr::bench::InitPolicy::spectral
                                   : mlr::bench::InitPolicy::perturbed;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"mixed linear regression benchmark harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "sample an instance and write it as CSV");
  RunArgs gen_args;
  gen->add_option("--d", gen_args.d, "dimension");
  gen->add_option("--n", gen_args.n, "sample count");
  gen->add_option("--k", gen_args.k, "number of components");
  gen->add_option("--sigma", gen_args.sigma, "noise standard deviation");
  gen->add_option("--seed", gen_args.seed, "root seed");
  gen->add_option("--out", gen_args.out, "output CSV path")->required();

  // am / gd
  auto* am = app.add_subcommand("am", "single alternating-minimization run");
  RunArgs am_args;
  add_run_options(am, am_args, true);
  auto* gd = app.add_subcommand("gd", "single gradient-heuristic run");
  RunArgs gd_args;
  gd_args.rounds = 400;
  gd_args.tol = 0.0;
  add_run_options(gd, gd_args, false);

  // rate
  auto* rate = app.add_subcommand("rate", "fit the convergence exponent of a trace CSV");
  std::string rate_trace;
  double window_lo = 1e-9, window_hi = 0.0;
  rate->add_option("--trace", rate_trace, "trace CSV path")->required();
  rate->add_option("--window-lo", window_lo, "lower window bound (default 1e-9)");
  rate->add_option("--window-hi", window_hi, "upper window bound (default: first dist)");

  // panel / table1 / lemma1
  auto* panel = app.add_subcommand("panel", "reproduce one figure panel");
  std::string panel_name, spec_path, out_dir = ".";
  std::vector<int> d_list;
  double n_over_d = 6.0, p_sigma = 0.0;
  int trials = 20, p_rounds = 0, p_k = 2;
  uint64_t p_seed = 1;
  std::string p_init = "perturbed";
  panel->add_option("name", panel_name, "fig3a|fig3b|fig3c|fig4a|fig4b|fig4c|custom")
      ->required();
  panel->add_option("--spec", spec_path, "JSON experiment spec");
  panel->add_option("--out-dir", out_dir, "output directory");
  panel->add_option("--d", d_list, "dimension list");
  panel->add_option("--n-over-d", n_over_d, "samples per dimension");
  panel->add_option("--sigma", p_sigma, "noise standard deviation");
  panel->add_option("--trials", trials, "trials per dimension");
  panel->add_option("--seed", p_seed, "root seed");
  panel->add_option("--rounds", p_rounds, "maximum rounds");
  panel->add_option("--k", p_k, "number of components");
  panel->add_option("--init", p_init, "perturbed|spectral")
      ->check(CLI::IsMember({"perturbed", "spectral"}));

  auto* table = app.add_subcommand("table1", "AM vs tuned GD to a target precision");
  std::string t_spec, t_out = ".";
  std::vector<int> t_d;
  int t_trials = 20;
  double t_target = 1e-3;
  uint64_t t_seed = 1;
  table->add_option("--spec", t_spec, "JSON experiment spec");
  table->add_option("--out-dir", t_out, "output directory");
  table->add_option("--d", t_d, "dimension list");
  table->add_option("--trials", t_trials, "trials per dimension");
  table->add_option("--target", t_target, "target precision");
  table->add_option("--seed", t_seed, "root seed");

  auto* lemma = app.add_subcommand("lemma1", "mismatch fraction vs init distance sweep");
  int l_d = 20, l_n = 2000, l_trials = 50;
  uint64_t l_seed = 1;
  std::string l_out = ".";
  std::vector<double> l_radii;
  lemma->add_option("--d", l_d, "dimension");
  lemma->add_option("--n", l_n, "sample count");
  lemma->add_option("--trials", l_trials, "trials per radius");
  lemma->add_option("--seed", l_seed, "root seed");
  lemma->add_option("--radii", l_radii, "radii (default: boundary * {1,1/2,1/4,1/8})");
  lemma->add_option("--out-dir", l_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // malformed invocation counts as an invalid spec
  }

  if (gen->parsed()) {
    const mlr::GroundTruth truth = mlr::random_truth(
        gen_args.k, gen_args.d, gen_args.sigma, mlr::rng::derive(gen_args.seed, 11));
    const mlr::Instance inst =
        mlr::sample_instance(truth, gen_args.n, mlr::rng::derive(gen_args.seed, 12));
    mlr::write_instance_csv(inst, gen_args.out);
    std::cout << "wrote " << gen_args.out << " (" << inst.n() << " x " << inst.dim()
              << ")\n";
    return 0;
  }

  if (am->parsed()) {
    PreparedRun p = prepare_run(am_args);
    mlr::AmConfig cfg;
    cfg.max_rounds = am_args.rounds;
    cfg.sample_split = am_args.split;
    cfg.tol = am_args.tol;
    cfg.split_seed = mlr::rng::derive(am_args.seed, 14);
    const mlr::Trace tr = mlr::run_am(p.inst, p.init, cfg);
    mlr::write_trace_csv(tr, am_args.out);
    write_run_sidecar(am_args, p, tr, std::nullopt);
    std::cout << "wrote " << am_args.out << " (" << tr.iterates.size() - 1
              << " rounds, final dist "
              << (tr.dist_to_truth.empty() ? std::string("n/a")
                                           : mlr::fmt17(tr.dist_to_truth.back()))
              << ")\n";
    return 0;
  }

  if (gd->parsed()) {
    PreparedRun p = prepare_run(gd_args);
    mlr::GdConfig cfg;
    cfg.gamma = gd_args.gamma > 0.0 ? gd_args.gamma
                                    : mlr::tune_step_size(p.inst, p.init, 10);
    cfg.max_rounds = gd_args.rounds;
    cfg.tol = gd_args.tol;
    const mlr::Trace tr = mlr::run_gd(p.inst, p.init, cfg);
    mlr::write_trace_csv(tr, gd_args.out);
    write_run_sidecar(gd_args, p, tr, cfg.gamma);
    std::cout << "wrote " << gd_args.out << " (gamma " << mlr::fmt17(cfg.gamma)
              << ", " << tr.iterates.size() - 1 << " rounds)\n";
    return 0;
  }

  if (rate->parsed()) {
    const std::vector<double> seq = mlr::read_trace_dist_csv(rate_trace);
    const double hi = window_hi > 0.0 ? window_hi : (seq.empty() ? 1.0 : seq.front());
    const mlr::RateFit fit = mlr::fit_convergence_exponent(seq, {window_lo, hi});
    std::cout << "slope=" << mlr::fmt17(fit.slope)
              << " intercept=" << mlr::fmt17(fit.intercept)
              << " r_squared=" << mlr::fmt17(fit.r_squared)
              << " points_used=" << fit.points_used << "\n";
    return 0;
  }

  if (panel->parsed()) {
    mlr::bench::ExperimentSpec spec =
        !spec_path.empty() ? mlr::bench::spec_from_json_file(spec_path)
                           : mlr::bench::default_spec(mlr::bench::panel_from_string(panel_name));
    if (!spec_path.empty()) spec.panel = mlr::bench::panel_from_string(panel_name);
    apply_spec_overrides(spec, panel, d_list, n_over_d, p_sigma, trials, p_seed, p_init,
                         p_rounds, p_k);
    std::filesystem::create_directories(out_dir);
    const mlr::bench::PanelResult res = mlr::bench::run_panel(spec, out_dir);
    for (const auto& [d, fit] : res.curve_fits)
      std::cout << "d=" << d << " slope=" << mlr::fmt17(fit.slope)
                << " r_squared=" << mlr::fmt17(fit.r_squared)
                << " points_used=" << fit.points_used << "\n";
    std::cout << "wrote " << res.records.size() << " records to " << out_dir << "\n";
    return 0;
  }

  if (table->parsed()) {
    mlr::bench::ExperimentSpec spec =
        !t_spec.empty() ? mlr::bench::spec_from_json_file(t_spec)
                        : mlr::bench::default_spec(mlr::bench::Panel::table1);
    spec.panel = mlr::bench::Panel::table1;
    if (table->count("--d") > 0) spec.d_list = t_d;
    if (table->count("--trials") > 0) spec.trials = t_trials;
    if (table->count("--target") > 0) spec.target_precision = t_target;
    if (table->count("--seed") > 0) spec.root_seed = t_seed;
    std::filesystem::create_directories(t_out);
    const auto rows = mlr::bench::compare_table(spec, t_out);
    for (const auto& r : rows)
      std::cout << "d=" << r.d << " " << r.algorithm
                << " iterations=" << mlr::fmt17(r.iterations)
                << " wall_clock_s=" << mlr::fmt17(r.wall_clock_s) << "\n";
    return 0;
  }

  if (lemma->parsed()) {
    std::vector<double> radii = l_radii;
    if (radii.empty()) {
      const mlr::GroundTruth truth =
          mlr::random_truth(2, l_d, 0.0, mlr::rng::derive(l_seed, 7));
      const double b = mlr::boundary_radius(truth, l_n);
      radii = {b, b / 2.0, b / 4.0, b / 8.0};
    }
    std::filesystem::create_directories(l_out);
    const auto res = mlr::bench::lemma1_sweep(l_d, l_n, radii, l_trials, l_seed, l_out);
    std::cout << "slope=" << mlr::fmt17(res.slope)
              << " intercept=" << mlr::fmt17(res.intercept)
              << " r_squared=" << mlr::fmt17(res.r_squared) << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const mlr::InvalidSpec& e) {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return 1;
  } catch (const mlr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
