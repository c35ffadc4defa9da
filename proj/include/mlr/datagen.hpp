#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlr/types.hpp"

namespace mlr {

/// True mixture: K regressors, mixing weights, noise level.
struct GroundTruth {
  std::vector<Vector> thetas;
  Vector mixing;
  double sigma = 0.0;

  int k() const { return static_cast<int>(thetas.size()); }
  int dim() const { return thetas.empty() ? 0 : static_cast<int>(thetas[0].size()); }
  void validate() const;
  double min_pair_separation() const;
};

/// Candidate regressor tuple: an initialization or a solver iterate.
struct ParamSet {
  std::vector<Vector> thetas;

  int k() const { return static_cast<int>(thetas.size()); }
  int dim() const { return thetas.empty() ? 0 : static_cast<int>(thetas[0].size()); }
};

/// Sampled observations. Labels z are kept for oracle checks and
/// mismatch measurements; solvers never read them.
struct Instance {
  Matrix X;
  Vector y;
  std::vector<int> z;  // empty when labels are unknown (external data)
  std::optional<GroundTruth> truth;

  int n() const { return X.rows; }
  int dim() const { return X.cols; }
};

/// Regressors drawn entrywise iid standard normal, uniform mixing.
GroundTruth random_truth(int K, int d, double sigma, uint64_t seed);
GroundTruth random_truth(int K, int d, double sigma, const Vector& mixing, uint64_t seed);

/// y_i = <x_i, theta*_{z_i}> + w_i with x_i iid standard Gaussian,
/// z_i drawn from the mixing weights and w_i ~ N(0, sigma^2). The seed
/// splits into covariate/label/noise sub-streams, so changing sigma
/// leaves X and z untouched.
Instance sample_instance(const GroundTruth& truth, int n, uint64_t seed);

/// theta_j = theta*_j + radius * u_j with u_j an independent uniform
/// unit-sphere direction; component-wise error equals radius exactly.
ParamSet perturbed_init(const GroundTruth& truth, double radius, uint64_t seed);

/// Largest initialization error at which the super-linear regime is
/// entered: min pairwise separation / (2 ln n).
double boundary_radius(const GroundTruth& truth, int n);

/// CSV with header `i,y,z,x_0,...,x_{d-1}`, 17 significant digits.
void write_instance_csv(const Instance& inst, const std::string& path);

}  // namespace mlr
