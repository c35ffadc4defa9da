#include "mlr/am.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "mlr/linalg.hpp"
#include "mlr/metrics.hpp"
#include "mlr/rng.hpp"

namespace mlr {

namespace {

Instance take_rows(const Instance& inst, const std::vector<int>& rows) {
  const int d = inst.dim();
  Instance out;
  out.X = Matrix(static_cast<int>(rows.size()), d);
  out.y.resize(rows.size());
  if (!inst.z.empty()) out.z.resize(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    const int i = rows[r];
    const double* src = inst.X.row(i);
    double* dst = out.X.row(static_cast<int>(r));
    for (int j = 0; j < d; ++j) dst[j] = src[j];
    out.y[r] = inst.y[i];
    if (!inst.z.empty()) out.z[r] = inst.z[i];
  }
  out.truth = inst.truth;
  return out;
}

double movement(const ParamSet& a, const ParamSet& b) {
  double m = 0.0;
  for (int j = 0; j < a.k(); ++j) m = std::max(m, norm2_diff(a.thetas[j], b.thetas[j]));
  return m;
}

bool truth_matches(const Instance& inst, const ParamSet& params) {
  return inst.truth && inst.truth->k() == params.k() && inst.truth->dim() == params.dim();
}

}  // namespace

std::vector<Instance> split_samples(const Instance& inst, int T, uint64_t seed) {
  const int n = inst.n();
  if (T < 1) throw InvalidSpec("split_samples: T must be >= 1");
  if (T > n) throw TooManyGroups("split_samples: more groups than samples");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  uint64_t counter = 0;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng::uniform01(seed, counter++) * (i + 1));
    std::swap(perm[i], perm[j]);
  }

  const int g = n / T;  // remainder samples are discarded
  std::vector<Instance> groups;
  groups.reserve(T);
  for (int t = 0; t < T; ++t) {
    std::vector<int> rows(perm.begin() + static_cast<size_t>(t) * g,
                          perm.begin() + static_cast<size_t>(t + 1) * g);
    groups.push_back(take_rows(inst, rows));
  }
  return groups;
}

std::vector<int> assign_labels(const Instance& inst, const ParamSet& params) {
  const int K = params.k();
  const int d = inst.dim();
  if (K == 0 || params.dim() != d)
    throw DimensionMismatch("assign_labels: parameter dimension does not match instance");
  std::vector<int> labels(inst.n());
  for (int i = 0; i < inst.n(); ++i) {
    const double* xi = inst.X.row(i);
    double best = std::fabs(inst.y[i] - dot(xi, params.thetas[0].data(), d));
    int lab = 0;
    for (int j = 1; j < K; ++j) {
      const double r = std::fabs(inst.y[i] - dot(xi, params.thetas[j].data(), d));
      if (r < best) {
        best = r;
        lab = j;
      }
    }
    labels[i] = lab;
  }
  return labels;
}

ParamSet refit(const Instance& inst, const std::vector<int>& labels, int K,
               const ParamSet& prev, TraceDiagnostics* diag) {
  const int n = inst.n();
  const int d = inst.dim();
  if (static_cast<int>(labels.size()) != n)
    throw DimensionMismatch("refit: label vector length does not match instance");
  if (prev.k() != K || prev.dim() != d)
    throw DimensionMismatch("refit: previous parameters do not match");
  for (int i = 0; i < n; ++i)
    if (labels[i] < 0 || labels[i] >= K) throw DimensionMismatch("refit: label out of range");

  std::vector<std::vector<int>> rows(K);
  for (int i = 0; i < n; ++i) rows[labels[i]].push_back(i);

  ParamSet out;
  out.thetas.resize(K);
  for (int j = 0; j < K; ++j) {
    if (rows[j].empty()) {
      out.thetas[j] = prev.thetas[j];
      if (diag != nullptr) ++diag->empty_cluster_events;
      continue;
    }
    const int m = static_cast<int>(rows[j].size());
    Matrix A(m, d);
    Vector b(m);
    for (int r = 0; r < m; ++r) {
      const double* src = inst.X.row(rows[j][r]);
      double* dst = A.row(r);
      for (int c = 0; c < d; ++c) dst[c] = src[c];
      b[r] = inst.y[rows[j][r]];
    }
    LstsqInfo info;
    out.thetas[j] = solve_least_squares(A, b, &info);
    if (info.rank_deficient && diag != nullptr) ++diag->rank_deficient_events;
  }
  return out;
}

Trace run_am(const Instance& inst, const ParamSet& init, const AmConfig& cfg) {
  const int K = init.k();
  if (K == 0 || init.dim() != inst.dim())
    throw DimensionMismatch("run_am: init does not match instance dimension");
  if (cfg.max_rounds < 1) throw InvalidSpec("run_am: max_rounds must be >= 1");
  if (!(cfg.tol >= 0.0)) throw InvalidSpec("run_am: tol must be >= 0");

  std::vector<Instance> groups;
  if (cfg.sample_split) groups = split_samples(inst, cfg.max_rounds, cfg.split_seed);
  const bool track = cfg.track_truth && truth_matches(inst, init);

  Trace tr;
  tr.iterates.push_back(init);
  tr.loss_seq.push_back(loss(inst, init));
  if (track) tr.dist_to_truth.push_back(dist(init, *inst.truth));

  ParamSet cur = init;
  for (int t = 0; t < cfg.max_rounds; ++t) {
    const Instance& work = cfg.sample_split ? groups[t] : inst;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> labels = assign_labels(work, cur);
    ParamSet next = refit(work, labels, K, cur, &tr.diagnostics);
    const auto t1 = std::chrono::steady_clock::now();
    tr.wall_clock_per_iter.push_back(std::chrono::duration<double>(t1 - t0).count());

    tr.iterates.push_back(next);
    tr.loss_seq.push_back(loss(inst, next));
    if (track) tr.dist_to_truth.push_back(dist(next, *inst.truth));

    const double step = movement(next, cur);
    cur = std::move(next);
    if (step < cfg.tol) {
      tr.converged_at = t + 1;
      break;
    }
  }
  tr.labels_final = assign_labels(inst, cur);
  return tr;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "iter,dist,loss,wall_clock_s\n";
  for (size_t t = 0; t < trace.iterates.size(); ++t) {
    out << t << ',';
    if (t < trace.dist_to_truth.size()) out << fmt17(trace.dist_to_truth[t]);
    out << ',' << fmt17(trace.loss_seq[t]) << ','
        << fmt17(t == 0 ? 0.0 : trace.wall_clock_per_iter[t - 1]) << "\n";
  }
}

std::vector<double> read_trace_dist_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");

  int dist_col = -1;
  {
    std::stringstream ss(line);
    std::string field;
    for (int c = 0; std::getline(ss, field, ','); ++c)
      if (field == "dist") dist_col = c;
  }
  if (dist_col < 0) throw Error(path + ": no dist column in header");

  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    for (int c = 0; std::getline(ss, field, ','); ++c) {
      if (c == dist_col) {
        if (field.empty()) throw Error(path + ": empty dist value");
        out.push_back(std::stod(field));
      }
    }
  }
  return out;
}

}  // namespace mlr
