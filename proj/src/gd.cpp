#include "mlr/gd.hpp"

#include <chrono>
#include <cmath>

#include "mlr/linalg.hpp"
#include "mlr/metrics.hpp"

namespace mlr {

ParamSet gd_step(const Instance& inst, const ParamSet& params,
                 const std::vector<int>& labels, double gamma) {
  const int K = params.k();
  const int d = inst.dim();
  if (K == 0 || params.dim() != d)
    throw DimensionMismatch("gd_step: parameter dimension does not match instance");
  if (static_cast<int>(labels.size()) != inst.n())
    throw DimensionMismatch("gd_step: label vector length does not match instance");

  ParamSet out = params;
  for (int i = 0; i < inst.n(); ++i) {
    const int j = labels[i];
    if (j < 0 || j >= K) throw DimensionMismatch("gd_step: label out of range");
    const double* xi = inst.X.row(i);
    const double r = dot(xi, params.thetas[j].data(), d) - inst.y[i];
    const double c = gamma * 2.0 * r;
    if (c == 0.0) continue;
    double* theta = out.thetas[j].data();
    for (int m = 0; m < d; ++m) theta[m] -= c * xi[m];
  }
  return out;
}

Trace run_gd(const Instance& inst, const ParamSet& init, const GdConfig& cfg) {
  const int K = init.k();
  if (K == 0 || init.dim() != inst.dim())
    throw DimensionMismatch("run_gd: init does not match instance dimension");
  if (cfg.max_rounds < 1) throw InvalidSpec("run_gd: max_rounds must be >= 1");
  if (!(cfg.gamma >= 0.0)) throw InvalidSpec("run_gd: gamma must be nonnegative");
  const bool track = inst.truth && inst.truth->k() == K && inst.truth->dim() == init.dim();

  Trace tr;
  tr.iterates.push_back(init);
  const double loss0 = loss(inst, init);
  tr.loss_seq.push_back(loss0);
  if (track) tr.dist_to_truth.push_back(dist(init, *inst.truth));

  ParamSet cur = init;
  for (int t = 0; t < cfg.max_rounds; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> labels = assign_labels(inst, cur);
    ParamSet next = gd_step(inst, cur, labels, cfg.gamma);
    const auto t1 = std::chrono::steady_clock::now();
    tr.wall_clock_per_iter.push_back(std::chrono::duration<double>(t1 - t0).count());

    const double l = loss(inst, next);
    tr.iterates.push_back(next);
    tr.loss_seq.push_back(l);
    double dt = 0.0;
    if (track) {
      dt = dist(next, *inst.truth);
      tr.dist_to_truth.push_back(dt);
    }

    if (l > 1e6 * loss0) {
      tr.diagnostics.diverged = true;
      cur = std::move(next);
      break;
    }
    double step = 0.0;
    for (int j = 0; j < K; ++j)
      step = std::max(step, norm2_diff(next.thetas[j], cur.thetas[j]));
    cur = std::move(next);
    if (track && cfg.target_precision && dt <= *cfg.target_precision) {
      tr.converged_at = t + 1;
      break;
    }
    if (cfg.tol > 0.0 && step < cfg.tol) {
      tr.converged_at = t + 1;
      break;
    }
  }
  tr.labels_final = assign_labels(inst, cur);
  return tr;
}

double tune_step_size(const Instance& inst, const ParamSet& init, int probe_rounds) {
  if (probe_rounds < 2) throw InvalidSpec("tune_step_size: probe_rounds must be >= 2");
  const double gamma0 = 1.0 / (4.0 * inst.n());

  auto passes = [&](double g) {
    GdConfig cfg;
    cfg.gamma = g;
    cfg.max_rounds = probe_rounds;
    Trace tr = run_gd(inst, init, cfg);
    if (tr.diagnostics.diverged) return false;
    for (size_t t = 0; t + 1 < tr.loss_seq.size(); ++t)
      if (tr.loss_seq[t + 1] > tr.loss_seq[t] * (1.0 + 1e-12)) return false;
    return true;
  };

  if (!passes(gamma0))
    throw NoStableStep("tune_step_size: baseline step size already oscillates");
  double g = gamma0;
  for (int k = 0; k < 60; ++k) {
    const double g2 = 2.0 * g;
    if (!passes(g2)) return g;
    g = g2;
  }
  return g;
}

}  // namespace mlr
