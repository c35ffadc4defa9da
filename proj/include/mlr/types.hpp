#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlr {

using Vector = std::vector<double>;

/// Dense real matrix, row-major.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct MissingLabels : Error { using Error::Error; };
struct UnsupportedK : Error { using Error::Error; };
struct InsufficientPoints : Error { using Error::Error; };
struct TooManyGroups : Error { using Error::Error; };
struct NoStableStep : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };

/// 17 significant digits, enough for a lossless double round-trip.
std::string fmt17(double x);

}  // namespace mlr
