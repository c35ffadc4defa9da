#include "mlr/spectral.hpp"

#include <cmath>
#include <limits>

#include "mlr/metrics.hpp"

namespace mlr {

Matrix moment_matrix(const Instance& inst) {
  const int n = inst.n();
  const int d = inst.dim();
  if (n < 1 || d < 1) throw DimensionMismatch("moment_matrix: empty instance");
  Matrix M(d, d);
  for (int i = 0; i < n; ++i) {
    const double w = inst.y[i] * inst.y[i];
    const double* xi = inst.X.row(i);
    for (int a = 0; a < d; ++a) {
      const double wa = w * xi[a];
      double* row = M.row(a);
      for (int b = a; b < d; ++b) row[b] += wa * xi[b];
    }
  }
  const double inv = 1.0 / n;
  for (int a = 0; a < d; ++a) {
    M(a, a) *= inv;
    for (int b = a + 1; b < d; ++b) {
      M(a, b) *= inv;
      M(b, a) = M(a, b);  // mirrored, so exactly symmetric
    }
  }
  return M;
}

Matrix init_subspace(const Matrix& M) {
  if (M.rows != M.cols || M.rows < 2)
    throw DimensionMismatch("init_subspace: need a symmetric matrix with d >= 2");
  return top_k_eigpairs(M, 2).vectors;
}

GridSpec default_grid(const Instance& inst) {
  double my2 = 0.0;
  for (double v : inst.y) my2 += v * v;
  my2 /= inst.n();
  GridSpec g;
  g.points_per_axis = 41;
  g.radius = 1.5 * std::sqrt(my2);
  return g;
}

ParamSet grid_init(const Instance& inst, const Matrix& basis, const GridSpec& grid) {
  const int n = inst.n();
  const int d = inst.dim();
  if (basis.rows != d || basis.cols != 2)
    throw DimensionMismatch("grid_init: basis must be d x 2");
  if (grid.points_per_axis < 1 || !(grid.radius > 0.0))
    throw InvalidSpec("grid_init: invalid grid");

  const int G = grid.points_per_axis;
  const double R = grid.radius;
  std::vector<double> coords(G);
  if (G == 1)
    coords[0] = 0.0;
  else
    for (int i = 0; i < G; ++i) coords[i] = -R + 2.0 * R * i / (G - 1);

  // Predictions separate along the two axes: <x, a b1 + c b2> = a t1 + c t2.
  Vector t1(n), t2(n);
  for (int i = 0; i < n; ++i) {
    const double* xi = inst.X.row(i);
    double s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < d; ++j) {
      s1 += xi[j] * basis(j, 0);
      s2 += xi[j] * basis(j, 1);
    }
    t1[i] = s1;
    t2[i] = s2;
  }

  const int N = G * G;  // candidate q = ia * G + ic
  std::vector<double> sq(static_cast<size_t>(N) * n);
  for (int ia = 0; ia < G; ++ia) {
    for (int ic = 0; ic < G; ++ic) {
      double* row = sq.data() + static_cast<size_t>(ia * G + ic) * n;
      const double a = coords[ia], c = coords[ic];
      for (int i = 0; i < n; ++i) {
        const double r = inst.y[i] - a * t1[i] - c * t2[i];
        row[i] = r * r;
      }
    }
  }

  double best = std::numeric_limits<double>::infinity();
  int best1 = 0, best2 = 0;
  for (int q1 = 0; q1 < N; ++q1) {
    const double* s1 = sq.data() + static_cast<size_t>(q1) * n;
    for (int q2 = q1; q2 < N; ++q2) {
      const double* s2 = sq.data() + static_cast<size_t>(q2) * n;
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += std::min(s1[i], s2[i]);
      if (total < best) {
        best = total;
        best1 = q1;
        best2 = q2;
      }
    }
  }

  auto candidate = [&](int q) {
    const double a = coords[q / G], c = coords[q % G];
    Vector u(d);
    for (int j = 0; j < d; ++j) u[j] = a * basis(j, 0) + c * basis(j, 1);
    return u;
  };
  ParamSet out;
  out.thetas = {candidate(best1), candidate(best2)};
  return out;
}

ParamSet spectral_init(const Instance& inst, const GridSpec* grid) {
  const Matrix M = moment_matrix(inst);
  const Matrix basis = init_subspace(M);
  const GridSpec g = grid != nullptr ? *grid : default_grid(inst);
  return grid_init(inst, basis, g);
}

}  // namespace mlr
