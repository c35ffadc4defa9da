#include "mlr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "mlr/rng.hpp"
#include "mlr/spectral.hpp"

namespace mlr::bench {

namespace {

using nlohmann::json;

constexpr uint64_t kTruthTag = 11;
constexpr uint64_t kInstanceTag = 12;
constexpr uint64_t kInitTag = 13;
constexpr uint64_t kLemma1TruthTag = 7;
constexpr uint64_t kLemma1InitTag = 8;

std::ofstream open_out(const std::string& dir, const std::string& name) {
  const std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + p.string() + " for writing");
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return -1.0;
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  const double med = (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
  return std::isfinite(med) ? med : -1.0;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

LineFit line_fit(const std::vector<std::pair<double, double>>& pts) {
  const int m = static_cast<int>(pts.size());
  if (m < 2) throw InsufficientPoints("line_fit: need at least 2 points");
  double xm = 0.0, ym = 0.0;
  for (const auto& [x, y] : pts) {
    xm += x;
    ym += y;
  }
  xm /= m;
  ym /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - xm) * (x - xm);
    sxy += (x - xm) * (y - ym);
    syy += (y - ym) * (y - ym);
  }
  if (sxx <= 0.0) throw InsufficientPoints("line_fit: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  f.r_squared = (syy <= 0.0) ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return f;
}

bool is_gd_panel(Panel p) { return p == Panel::fig4b || p == Panel::fig4c; }

int default_rounds(Panel p) {
  switch (p) {
    case Panel::fig4a:
      return 50;
    case Panel::fig4b:
    case Panel::fig4c:
      return 300;
    case Panel::table1:
      return 25;  // AM side; the GD side gets its own cap
    case Panel::custom:
      return 50;
    default:
      return 12;
  }
}

double radius_from_policy(const std::string& policy, const GroundTruth& truth, int n) {
  if (policy == "boundary") return boundary_radius(truth, n);
  const std::string prefix = "boundary*";
  if (policy.rfind(prefix, 0) == 0) {
    const double f = std::stod(policy.substr(prefix.size()));
    if (!(f > 0.0)) throw InvalidSpec("init_radius_policy: factor must be positive");
    return f * boundary_radius(truth, n);
  }
  try {
    const double r = std::stod(policy);
    if (!(r >= 0.0)) throw InvalidSpec("init_radius_policy: radius must be >= 0");
    return r;
  } catch (const InvalidSpec&) {
    throw;
  } catch (const std::exception&) {
    throw InvalidSpec("init_radius_policy: cannot parse '" + policy + "'");
  }
}

struct TrialSetup {
  GroundTruth truth;
  Instance inst;
  ParamSet init;
};

TrialSetup make_trial(const ExperimentSpec& spec, int d, int trial) {
  const uint64_t seed = trial_seed(spec.root_seed, d, trial);
  const int n = static_cast<int>(std::lround(spec.n_over_d * d));
  TrialSetup t;
  t.truth = random_truth(spec.K, d, spec.sigma, rng::derive(seed, kTruthTag));
  t.inst = sample_instance(t.truth, n, rng::derive(seed, kInstanceTag));
  if (spec.init == InitPolicy::spectral) {
    if (spec.K != 2) throw InvalidSpec("spectral init supports K = 2 only");
    t.init = spectral_init(t.inst);
  } else {
    const double r = radius_from_policy(spec.init_radius_policy, t.truth, n);
    t.init = perturbed_init(t.truth, r, rng::derive(seed, kInitTag));
  }
  return t;
}

std::vector<double> mean_curve(const std::vector<std::vector<double>>& series) {
  size_t len = 0;
  for (const auto& s : series) len = std::max(len, s.size());
  std::vector<double> mean(len, 0.0);
  for (const auto& s : series)
    for (size_t i = 0; i < len; ++i)
      mean[i] += (i < s.size()) ? s[i] : s.back();  // converged runs hold their value
  for (double& v : mean) v /= static_cast<double>(series.size());
  return mean;
}

std::pair<double, double> default_window(const std::vector<double>& series) {
  const double hi = series.empty() ? 1.0 : series.front();
  return {1e-9, hi};
}

void write_meta_json(const ExperimentSpec& spec, const std::string& dir) {
  json j;
  j["panel"] = to_string(spec.panel);
  j["d_list"] = spec.d_list;
  j["n_over_d"] = spec.n_over_d;
  j["K"] = spec.K;
  j["sigma"] = spec.sigma;
  j["trials"] = spec.trials;
  j["root_seed"] = spec.root_seed;
  j["init"] = spec.init == InitPolicy::spectral ? "spectral" : "perturbed";
  j["init_radius_policy"] = spec.init_radius_policy;
  if (spec.target_precision) j["target_precision"] = *spec.target_precision;
  j["max_rounds"] = spec.max_rounds == 0 ? default_rounds(spec.panel) : spec.max_rounds;
  if (spec.K > 2)
    j["init_note"] = "K > 2 initialized by perturbing the truth; "
                     "no tensor-based initializer is provided";
  auto out = open_out(dir, to_string(spec.panel) + "_meta.json");
  out << j.dump(2) << "\n";
}

}  // namespace

Panel panel_from_string(const std::string& name) {
  if (name == "fig3a") return Panel::fig3a;
  if (name == "fig3b") return Panel::fig3b;
  if (name == "fig3c") return Panel::fig3c;
  if (name == "fig4a") return Panel::fig4a;
  if (name == "fig4b") return Panel::fig4b;
  if (name == "fig4c") return Panel::fig4c;
  if (name == "table1") return Panel::table1;
  if (name == "custom") return Panel::custom;
  throw InvalidSpec("unknown panel '" + name + "'");
}

std::string to_string(Panel p) {
  switch (p) {
    case Panel::fig3a: return "fig3a";
    case Panel::fig3b: return "fig3b";
    case Panel::fig3c: return "fig3c";
    case Panel::fig4a: return "fig4a";
    case Panel::fig4b: return "fig4b";
    case Panel::fig4c: return "fig4c";
    case Panel::table1: return "table1";
    case Panel::custom: return "custom";
  }
  return "custom";
}

void ExperimentSpec::validate() const {
  if (d_list.empty()) throw InvalidSpec("spec: d_list must be non-empty");
  for (int d : d_list)
    if (d < 1) throw InvalidSpec("spec: dimensions must be >= 1");
  if (!(n_over_d >= 1.0)) throw InvalidSpec("spec: n_over_d must be >= 1");
  if (K < 1) throw InvalidSpec("spec: K must be >= 1");
  if (!(sigma >= 0.0)) throw InvalidSpec("spec: sigma must be >= 0");
  if (trials < 1) throw InvalidSpec("spec: trials must be >= 1");
  if (max_rounds < 0) throw InvalidSpec("spec: max_rounds must be >= 0");
  if (target_precision && !(*target_precision > 0.0))
    throw InvalidSpec("spec: target_precision must be positive");
}

ExperimentSpec default_spec(Panel p) {
  ExperimentSpec s;
  s.panel = p;
  switch (p) {
    case Panel::fig3a:
      s.d_list = {50, 100, 250, 500};
      break;
    case Panel::fig3b:
      s.d_list = {250, 500};
      break;
    case Panel::fig3c:
      s.d_list = {200, 250};
      s.n_over_d = 15.0;
      s.K = 3;
      break;
    case Panel::fig4a:
      s.d_list = {250};
      s.sigma = 0.1;
      break;
    case Panel::fig4b:
      s.d_list = {50, 100, 250};
      break;
    case Panel::fig4c:
      s.d_list = {50, 100};
      break;
    case Panel::table1:
      s.d_list = {50, 100, 250};
      s.target_precision = 1e-3;
      break;
    case Panel::custom:
      s.d_list = {50};
      break;
  }
  return s;
}

ExperimentSpec spec_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open spec file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InvalidSpec(std::string("spec file is not valid JSON: ") + e.what());
  }
  ExperimentSpec s = default_spec(
      j.contains("panel") ? panel_from_string(j.at("panel").get<std::string>())
                          : Panel::custom);
  try {
    if (j.contains("d_list")) s.d_list = j.at("d_list").get<std::vector<int>>();
    if (j.contains("n_over_d")) s.n_over_d = j.at("n_over_d").get<double>();
    if (j.contains("K")) s.K = j.at("K").get<int>();
    if (j.contains("sigma")) s.sigma = j.at("sigma").get<double>();
    if (j.contains("trials")) s.trials = j.at("trials").get<int>();
    if (j.contains("root_seed")) s.root_seed = j.at("root_seed").get<uint64_t>();
    if (j.contains("init")) {
      const std::string v = j.at("init").get<std::string>();
      if (v == "perturbed") s.init = InitPolicy::perturbed;
      else if (v == "spectral") s.init = InitPolicy::spectral;
      else throw InvalidSpec("spec: init must be perturbed or spectral");
    }
    if (j.contains("init_radius_policy"))
      s.init_radius_policy = j.at("init_radius_policy").get<std::string>();
    if (j.contains("target_precision"))
      s.target_precision = j.at("target_precision").get<double>();
    if (j.contains("max_rounds")) s.max_rounds = j.at("max_rounds").get<int>();
  } catch (const InvalidSpec&) {
    throw;
  } catch (const std::exception& e) {
    throw InvalidSpec(std::string("spec field has the wrong type: ") + e.what());
  }
  s.validate();
  return s;
}

uint64_t trial_seed(uint64_t root_seed, int d, int trial) {
  return rng::derive(rng::derive(root_seed, static_cast<uint64_t>(d)),
                     static_cast<uint64_t>(trial));
}

PanelResult run_panel(const ExperimentSpec& spec, const std::string& out_dir) {
  spec.validate();
  if (spec.panel == Panel::table1)
    throw InvalidSpec("run_panel: use compare_table for the table1 panel");
  const int rounds = spec.max_rounds == 0 ? default_rounds(spec.panel) : spec.max_rounds;
  const bool gd = is_gd_panel(spec.panel);
  const bool opt_error = spec.panel == Panel::fig4a;

  PanelResult result;
  for (int d : spec.d_list) {
    std::vector<std::vector<double>> series_per_trial;
    for (int trial = 0; trial < spec.trials; ++trial) {
      TrialSetup t = make_trial(spec, d, trial);
      Trace trace;
      if (gd) {
        GdConfig cfg;
        cfg.gamma = tune_step_size(t.inst, t.init, 10);
        cfg.max_rounds = rounds;
        cfg.target_precision = spec.target_precision;
        trace = run_gd(t.inst, t.init, cfg);
      } else {
        AmConfig cfg;
        cfg.max_rounds = rounds;
        cfg.tol = 1e-12;
        trace = run_am(t.inst, t.init, cfg);
      }

      std::vector<double> series =
          opt_error ? optimization_error_seq(trace.iterates, trace.iterates.back())
                    : trace.dist_to_truth;

      RunRecord rec;
      rec.panel = to_string(spec.panel);
      rec.d = d;
      rec.n = t.inst.n();
      rec.K = spec.K;
      rec.sigma = spec.sigma;
      rec.trial = trial;
      rec.seed = trial_seed(spec.root_seed, d, trial);
      rec.init = spec.init == InitPolicy::spectral ? "spectral" : "perturbed";
      if (spec.target_precision && !trace.dist_to_truth.empty()) {
        for (size_t i = 0; i < trace.dist_to_truth.size(); ++i)
          if (trace.dist_to_truth[i] <= *spec.target_precision) {
            rec.iterations_to_target = static_cast<int>(i);
            break;
          }
      }
      double wall = 0.0;
      for (double w : trace.wall_clock_per_iter) wall += w;
      rec.wall_clock_s = wall;
      try {
        rec.fitted_slope = fit_convergence_exponent(series, default_window(series)).slope;
      } catch (const InsufficientPoints&) {
        rec.fitted_slope = std::numeric_limits<double>::quiet_NaN();
      }
      rec.final_dist = trace.dist_to_truth.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                   : trace.dist_to_truth.back();
      result.records.push_back(rec);
      series_per_trial.push_back(std::move(series));
    }

    std::vector<double> curve = mean_curve(series_per_trial);
    RateFit fit;
    try {
      fit = fit_convergence_exponent(curve, default_window(curve));
    } catch (const InsufficientPoints&) {
      fit.slope = std::numeric_limits<double>::quiet_NaN();
    }
    result.curve_fits.emplace_back(d, fit);
    result.mean_curves.emplace_back(d, std::move(curve));
  }

  if (!out_dir.empty()) {
    const std::string name = to_string(spec.panel);
    {
      auto out = open_out(out_dir, name + "_records.csv");
      out << "panel,d,n,K,sigma,trial,seed,init,iterations_to_target,"
             "wall_clock_s,fitted_slope,final_dist\n";
      for (const auto& r : result.records)
        out << r.panel << ',' << r.d << ',' << r.n << ',' << r.K << ','
            << fmt17(r.sigma) << ',' << r.trial << ',' << r.seed << ',' << r.init
            << ',' << r.iterations_to_target << ',' << fmt17(r.wall_clock_s) << ','
            << fmt17(r.fitted_slope) << ',' << fmt17(r.final_dist) << "\n";
    }
    {
      auto out = open_out(out_dir, name + "_curves.csv");
      out << "d,iter,mean_dist\n";
      for (const auto& [d, curve] : result.mean_curves)
        for (size_t i = 0; i < curve.size(); ++i)
          out << d << ',' << i << ',' << fmt17(curve[i]) << "\n";
    }
    {
      auto out = open_out(out_dir, name + "_loglog.csv");
      out << "d,log_dist_t,log_dist_t1\n";
      for (const auto& [d, curve] : result.mean_curves)
        for (size_t i = 0; i + 1 < curve.size(); ++i)
          if (curve[i] > 0.0 && curve[i + 1] > 0.0)
            out << d << ',' << fmt17(std::log(curve[i])) << ','
                << fmt17(std::log(curve[i + 1])) << "\n";
    }
    write_meta_json(spec, out_dir);
  }
  return result;
}

std::vector<TableRow> compare_table(const ExperimentSpec& spec, const std::string& out_dir) {
  spec.validate();
  if (spec.panel != Panel::table1) throw InvalidSpec("compare_table: panel must be table1");
  const double target = spec.target_precision.value_or(1e-3);
  const int am_rounds = spec.max_rounds == 0 ? 25 : spec.max_rounds;
  constexpr int kGdCap = 2000;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<TableRow> rows;
  for (int d : spec.d_list) {
    std::vector<double> am_iters, am_wall, gd_iters, gd_wall;
    for (int trial = 0; trial < spec.trials; ++trial) {
      TrialSetup t = make_trial(spec, d, trial);

      AmConfig am_cfg;
      am_cfg.max_rounds = am_rounds;
      am_cfg.tol = 1e-12;
      Trace am_tr = run_am(t.inst, t.init, am_cfg);
      double it_am = kInf, wall_am = kInf;
      for (size_t i = 0; i < am_tr.dist_to_truth.size(); ++i) {
        if (am_tr.dist_to_truth[i] <= target) {
          it_am = static_cast<double>(i);
          wall_am = 0.0;
          for (size_t w = 0; w < i; ++w) wall_am += am_tr.wall_clock_per_iter[w];
          break;
        }
      }
      am_iters.push_back(it_am);
      am_wall.push_back(wall_am);

      GdConfig gd_cfg;
      gd_cfg.gamma = tune_step_size(t.inst, t.init, 10);
      gd_cfg.max_rounds = kGdCap;
      gd_cfg.target_precision = target;
      Trace gd_tr = run_gd(t.inst, t.init, gd_cfg);
      if (gd_tr.converged_at) {
        gd_iters.push_back(static_cast<double>(*gd_tr.converged_at));
        double w = 0.0;
        for (double v : gd_tr.wall_clock_per_iter) w += v;
        gd_wall.push_back(w);
      } else {  // non-convergence sentinel; medians push it out
        gd_iters.push_back(kInf);
        gd_wall.push_back(kInf);
      }
    }
    rows.push_back({d, "am", median(am_iters), median(am_wall)});
    rows.push_back({d, "gd", median(gd_iters), median(gd_wall)});
  }

  if (!out_dir.empty()) {
    auto out = open_out(out_dir, "table1.csv");
    out << "d,algorithm,iterations,wall_clock_s\n";
    for (const auto& r : rows)
      out << r.d << ',' << r.algorithm << ',' << fmt17(r.iterations) << ','
          << fmt17(r.wall_clock_s) << "\n";
  }
  return rows;
}

Lemma1Result lemma1_sweep(int d, int n, const std::vector<double>& radii, int trials,
                          uint64_t seed, const std::string& out_dir) {
  if (d < 1 || n < 2 || trials < 1 || radii.empty())
    throw InvalidSpec("lemma1_sweep: need d >= 1, n >= 2, trials >= 1 and radii");
  for (double r : radii)
    if (!(r >= 0.0)) throw InvalidSpec("lemma1_sweep: radii must be >= 0");

  // One fixed truth and one fixed init per radius; instances are
  // re-sampled per trial so the mean fraction estimates the flip
  // probability at exactly that dist.
  const GroundTruth truth = random_truth(2, d, 0.0, rng::derive(seed, kLemma1TruthTag));
  std::vector<ParamSet> inits;
  inits.reserve(radii.size());
  for (size_t k = 0; k < radii.size(); ++k)
    inits.push_back(perturbed_init(truth, radii[k], rng::derive(seed, kLemma1InitTag + k)));

  std::vector<double> mean_frac(radii.size(), 0.0);
  for (int trial = 0; trial < trials; ++trial) {
    const Instance inst = sample_instance(truth, n, trial_seed(seed, d, trial));
    for (size_t k = 0; k < radii.size(); ++k) {
      const MismatchReport rep = mismatch_set(inst, inits[k]);
      mean_frac[k] += static_cast<double>(rep.size) / n;
    }
  }
  for (double& v : mean_frac) v /= trials;

  Lemma1Result res;
  for (size_t k = 0; k < radii.size(); ++k) res.points.emplace_back(radii[k], mean_frac[k]);
  const LineFit fit = line_fit(res.points);
  res.slope = fit.slope;
  res.intercept = fit.intercept;
  res.r_squared = fit.r_squared;

  if (!out_dir.empty()) {
    auto out = open_out(out_dir, "lemma1.csv");
    out << "dist,mean_frac_mismatch\n";
    for (const auto& [r, f] : res.points)
      out << fmt17(r) << ',' << fmt17(f) << "\n";
  }
  return res;
}

}  // namespace mlr::bench
