#pragma once

#include "mlr/datagen.hpp"
#include "mlr/linalg.hpp"

namespace mlr {

struct GridSpec {
  int points_per_axis = 41;
  double radius = 1.0;  // coefficient range [-radius, radius] per basis axis
};

/// (1/n) sum_i y_i^2 x_i x_i^T, exactly symmetric by construction.
/// The 1/n normalization keeps entries bounded; eigenvectors are
/// unchanged by the scaling.
Matrix moment_matrix(const Instance& inst);

/// Orthonormal basis (d x 2) of the top-2 eigenvector subspace of M.
Matrix init_subspace(const Matrix& M);

/// Data-driven grid: radius 1.5 * sqrt(mean y^2), 41 points per axis.
GridSpec default_grid(const Instance& inst);

/// Evaluates the mixture loss over all unordered pairs of grid points
/// a b1 + c b2 and returns the best pair; ties break toward the lowest
/// lexicographic grid index.
ParamSet grid_init(const Instance& inst, const Matrix& basis, const GridSpec& grid);

/// Full pipeline: moment matrix, top-2 subspace, grid search.
ParamSet spectral_init(const Instance& inst, const GridSpec* grid = nullptr);

}  // namespace mlr
