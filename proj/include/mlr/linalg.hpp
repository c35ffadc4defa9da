#pragma once

#include <cstdint>

#include "mlr/types.hpp"

namespace mlr {

/// Top-k eigenpairs of a symmetric matrix, eigenvalues in descending
/// algebraic order, eigenvectors as orthonormal columns.
struct EigPairs {
  Vector values;
  Matrix vectors;  // d x k
};

struct LstsqInfo {
  int rank = 0;
  bool rank_deficient = false;
};

double dot(const double* a, const double* b, int n);
double norm2(const Vector& v);
double norm2_diff(const Vector& a, const Vector& b);

/// n x d matrix of iid standard normals; pure function of (seed, n, d).
Matrix standard_gaussian_matrix(uint64_t seed, int n, int d);

/// Minimum-norm minimizer of |Ax - b|^2 via Householder QR with column
/// pivoting. Effective rank below d (diagonal tolerance 1e-10 relative
/// to the largest pivot) switches to a complete orthogonal decomposition
/// and is reported through `info` rather than thrown; the minimum-norm
/// solution is still returned.
Vector solve_least_squares(const Matrix& A, const Vector& b, LstsqInfo* info = nullptr);

/// Top-k eigenpairs of symmetric S by block power iteration: shift by
/// the infinity norm so magnitude order matches algebraic order, iterate
/// a k-column block with re-orthogonalization, extract Ritz pairs.
/// Budget 10000 rounds, per-pair residual tolerance 1e-9 * (1 + |lambda|).
EigPairs top_k_eigpairs(const Matrix& S, int k);

}  // namespace mlr
