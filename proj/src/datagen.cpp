#include "mlr/datagen.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "mlr/linalg.hpp"
#include "mlr/rng.hpp"

namespace mlr {

namespace {
// sub-stream tags of an instance seed
constexpr uint64_t kCovariates = 1;
constexpr uint64_t kLabels = 2;
constexpr uint64_t kNoise = 3;
constexpr uint64_t kDirections = 0x9000;
constexpr uint64_t kTruthThetas = 0xA000;
}  // namespace

void GroundTruth::validate() const {
  if (thetas.empty()) throw InvalidSpec("ground truth: K must be >= 1");
  const size_t d = thetas[0].size();
  if (d == 0) throw InvalidSpec("ground truth: dimension must be >= 1");
  for (const auto& t : thetas) {
    if (t.size() != d) throw InvalidSpec("ground truth: regressor dimensions differ");
    for (double v : t)
      if (!std::isfinite(v)) throw InvalidSpec("ground truth: non-finite regressor entry");
  }
  if (mixing.size() != thetas.size())
    throw InvalidSpec("ground truth: mixing length must equal K");
  double sum = 0.0;
  for (double p : mixing) {
    if (!(p >= 0.0)) throw InvalidSpec("ground truth: negative mixing weight");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw InvalidSpec("ground truth: mixing weights must sum to 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw InvalidSpec("ground truth: sigma must be finite and >= 0");
}

double GroundTruth::min_pair_separation() const {
  if (k() < 2) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k(); ++i)
    for (int j = i + 1; j < k(); ++j)
      best = std::min(best, norm2_diff(thetas[i], thetas[j]));
  return best;
}

GroundTruth random_truth(int K, int d, double sigma, uint64_t seed) {
  if (K < 1) throw InvalidSpec("random_truth: K must be >= 1");
  Vector mixing(K, 1.0 / K);
  return random_truth(K, d, sigma, mixing, seed);
}

GroundTruth random_truth(int K, int d, double sigma, const Vector& mixing, uint64_t seed) {
  GroundTruth gt;
  gt.thetas.assign(K, Vector(d));
  for (int j = 0; j < K; ++j) {
    const uint64_t s = rng::derive(seed, kTruthThetas + static_cast<uint64_t>(j));
    for (int i = 0; i < d; ++i) gt.thetas[j][i] = rng::normal(s, i);
  }
  gt.mixing = mixing;
  gt.sigma = sigma;
  gt.validate();
  return gt;
}

Instance sample_instance(const GroundTruth& truth, int n, uint64_t seed) {
  truth.validate();
  if (n < 1) throw InvalidSpec("sample_instance: n must be >= 1");
  const int d = truth.dim();
  const int K = truth.k();

  Instance inst;
  inst.X = standard_gaussian_matrix(rng::derive(seed, kCovariates), n, d);
  inst.y.resize(n);
  inst.z.resize(n);
  const uint64_t lab = rng::derive(seed, kLabels);
  const uint64_t noi = rng::derive(seed, kNoise);
  for (int i = 0; i < n; ++i) {
    const double u = rng::uniform01(lab, i);
    int zi = K - 1;
    double acc = 0.0;
    for (int j = 0; j < K; ++j) {
      acc += truth.mixing[j];
      if (u < acc) {
        zi = j;
        break;
      }
    }
    inst.z[i] = zi;
    const double w = truth.sigma == 0.0 ? 0.0 : truth.sigma * rng::normal(noi, i);
    inst.y[i] = dot(inst.X.row(i), truth.thetas[zi].data(), d) + w;
  }
  inst.truth = truth;
  return inst;
}

ParamSet perturbed_init(const GroundTruth& truth, double radius, uint64_t seed) {
  truth.validate();
  if (!(radius >= 0.0)) throw InvalidSpec("perturbed_init: radius must be >= 0");
  const int d = truth.dim();
  ParamSet out;
  out.thetas = truth.thetas;
  if (radius == 0.0) return out;
  for (int j = 0; j < truth.k(); ++j) {
    const uint64_t s = rng::derive(seed, kDirections + static_cast<uint64_t>(j));
    Vector u(d);
    double nrm = 0.0;
    uint64_t block = 0;
    do {  // the zero draw has probability zero; regenerate just in case
      for (int i = 0; i < d; ++i) u[i] = rng::normal(s, block * d + i);
      nrm = norm2(u);
      ++block;
    } while (nrm < 1e-200);
    for (int i = 0; i < d; ++i) out.thetas[j][i] += radius * (u[i] / nrm);
  }
  return out;
}

double boundary_radius(const GroundTruth& truth, int n) {
  if (n < 2) throw InvalidSpec("boundary_radius: n must be >= 2");
  return truth.min_pair_separation() / (2.0 * std::log(static_cast<double>(n)));
}

void write_instance_csv(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "i,y,z";
  for (int j = 0; j < inst.dim(); ++j) out << ",x_" << j;
  out << "\n";
  for (int i = 0; i < inst.n(); ++i) {
    out << i << ',' << fmt17(inst.y[i]) << ',';
    if (!inst.z.empty()) out << inst.z[i];
    for (int j = 0; j < inst.dim(); ++j) out << ',' << fmt17(inst.X(i, j));
    out << "\n";
  }
}

}  // namespace mlr
