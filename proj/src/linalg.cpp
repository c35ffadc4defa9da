#include "mlr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlr/rng.hpp"

namespace mlr {

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& v) {
  return std::sqrt(dot(v.data(), v.data(), static_cast<int>(v.size())));
}

double norm2_diff(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Matrix standard_gaussian_matrix(uint64_t seed, int n, int d) {
  if (n < 1 || d < 1) throw DimensionMismatch("standard_gaussian_matrix: n and d must be >= 1");
  Matrix m(n, d);
  const size_t total = static_cast<size_t>(n) * d;
  for (size_t k = 0; k < total; ++k) m.data[k] = rng::normal(seed, k);
  return m;
}

namespace {

// Column-major scratch so reflector construction and application walk
// contiguous memory.
struct ColMat {
  int n = 0, d = 0;
  std::vector<double> a;
  ColMat(int n_, int d_) : n(n_), d(d_), a(static_cast<size_t>(n_) * d_) {}
  double* col(int j) { return a.data() + static_cast<size_t>(j) * n; }
  const double* col(int j) const { return a.data() + static_cast<size_t>(j) * n; }
};

// Householder reflector H = I - tau v v^T annihilating x[1..m); v[0] = 1
// is implicit, the tail is written back into x[1..m) and x[0] receives
// the resulting (nonnegative) diagonal entry.
double make_householder(double* x, int m) {
  double sigma = 0.0;
  for (int i = 1; i < m; ++i) sigma += x[i] * x[i];
  if (sigma == 0.0) return 0.0;  // column already reduced; keep x[0]
  const double x0 = x[0];
  const double mu = std::sqrt(x0 * x0 + sigma);
  const double v0 = (x0 <= 0.0) ? x0 - mu : -sigma / (x0 + mu);
  const double tau = 2.0 * v0 * v0 / (sigma + v0 * v0);
  const double inv = 1.0 / v0;
  for (int i = 1; i < m; ++i) x[i] *= inv;
  x[0] = mu;
  return tau;
}

// Applies H = I - tau v v^T (v[0] = 1 implicit, tail in v[1..m)) to y[0..m).
void apply_householder(const double* v, double tau, int m, double* y) {
  if (tau == 0.0) return;
  double w = y[0];
  for (int i = 1; i < m; ++i) w += v[i] * y[i];
  w *= tau;
  y[0] -= w;
  for (int i = 1; i < m; ++i) y[i] -= w * v[i];
}

constexpr double kRankTol = 1e-10;

}  // namespace

Vector solve_least_squares(const Matrix& A, const Vector& b, LstsqInfo* info) {
  const int n = A.rows, d = A.cols;
  if (n < 1 || d < 1) throw DimensionMismatch("solve_least_squares: empty system");
  if (static_cast<int>(b.size()) != n)
    throw DimensionMismatch("solve_least_squares: rhs length does not match rows");

  ColMat F(n, d);
  for (int j = 0; j < d; ++j) {
    double* c = F.col(j);
    for (int i = 0; i < n; ++i) c[i] = A(i, j);
  }
  Vector qtb = b;
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> colnorm2(d), colnorm2_init(d);
  for (int j = 0; j < d; ++j) {
    colnorm2[j] = dot(F.col(j), F.col(j), n);
    colnorm2_init[j] = colnorm2[j];
  }

  const int p = std::min(n, d);
  int rank = 0;
  double rmax = 0.0;

  for (int k = 0; k < p; ++k) {
    // pivot: remaining column of largest norm
    int piv = k;
    for (int j = k + 1; j < d; ++j)
      if (colnorm2[j] > colnorm2[piv]) piv = j;
    if (piv != k) {
      double* ck = F.col(k);
      double* cp = F.col(piv);
      for (int i = 0; i < n; ++i) std::swap(ck[i], cp[i]);
      std::swap(perm[k], perm[piv]);
      std::swap(colnorm2[k], colnorm2[piv]);
      std::swap(colnorm2_init[k], colnorm2_init[piv]);
    }

    double* ck = F.col(k);
    const double tau = make_householder(ck + k, n - k);
    const double rkk = std::fabs(ck[k]);
    if (k == 0) rmax = rkk;
    if (rkk <= kRankTol * rmax) break;  // effective rank reached; reflector discarded
    rank = k + 1;

    for (int j = k + 1; j < d; ++j) {
      apply_householder(ck + k, tau, n - k, F.col(j) + k);
      // downdate the remaining norm; recompute when cancellation bites
      double* cj = F.col(j);
      colnorm2[j] -= cj[k] * cj[k];
      if (colnorm2[j] < 1e-8 * colnorm2_init[j]) {
        colnorm2[j] = dot(cj + k + 1, cj + k + 1, n - k - 1);
        colnorm2_init[j] = colnorm2[j];
      }
    }
    apply_householder(ck + k, tau, n - k, qtb.data() + k);
  }

  if (info != nullptr) {
    info->rank = rank;
    info->rank_deficient = rank < d;
  }

  Vector x(d, 0.0);
  if (rank == 0) return x;  // zero matrix: minimum-norm solution is 0

  std::vector<double> z(d, 0.0);
  if (rank == d) {
    // back-substitution on the square upper-triangular R
    for (int i = d - 1; i >= 0; --i) {
      double s = qtb[i];
      for (int j = i + 1; j < d; ++j) s -= F.col(j)[i] * z[j];
      z[i] = s / F.col(i)[i];
    }
  } else {
    // Minimum-norm solution through the trapezoid T = R[0:r, 0:d]:
    // factor T^T = Q~ R~, forward-solve R~^T w = Q^T b, lift z = Q~ w.
    const int r = rank;
    ColMat B(d, r);  // B = T^T
    for (int i = 0; i < r; ++i) {
      double* bc = B.col(i);
      for (int j = 0; j < d; ++j) bc[j] = (j < i) ? 0.0 : F.col(j)[i];
    }
    std::vector<double> taus2(r, 0.0);
    for (int k = 0; k < r; ++k) {
      double* ck = B.col(k);
      taus2[k] = make_householder(ck + k, d - k);
      for (int j = k + 1; j < r; ++j)
        apply_householder(ck + k, taus2[k], d - k, B.col(j) + k);
    }
    Vector w(r, 0.0);
    for (int i = 0; i < r; ++i) {  // forward solve on R~^T
      double s = qtb[i];
      for (int j = 0; j < i; ++j) s -= B.col(i)[j] * w[j];
      w[i] = s / B.col(i)[i];
    }
    for (int i = 0; i < r; ++i) z[i] = w[i];
    for (int k = r - 1; k >= 0; --k)
      apply_householder(B.col(k) + k, taus2[k], d - k, z.data() + k);
  }

  for (int j = 0; j < d; ++j) x[perm[j]] = z[j];
  return x;
}

namespace {

// Cyclic Jacobi diagonalization of a small symmetric matrix; returns
// eigenvalues descending with matching eigenvector columns.
void jacobi_sym_eig(std::vector<double>& B, int k, Vector& values, std::vector<double>& V) {
  V.assign(static_cast<size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) V[static_cast<size_t>(i) * k + i] = 1.0;
  auto at = [&](std::vector<double>& M, int i, int j) -> double& {
    return M[static_cast<size_t>(i) * k + j];
  };
  for (int sweep = 0; sweep < 128; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        (i == j ? diag : off) += at(B, i, j) * at(B, i, j);
    if (off <= 1e-30 * (1.0 + diag)) break;
    for (int p = 0; p < k - 1; ++p) {
      for (int q = p + 1; q < k; ++q) {
        const double apq = at(B, p, q);
        if (apq == 0.0) continue;
        const double theta = (at(B, q, q) - at(B, p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int i = 0; i < k; ++i) {
          const double bip = at(B, i, p), biq = at(B, i, q);
          at(B, i, p) = c * bip - s * biq;
          at(B, i, q) = s * bip + c * biq;
        }
        for (int i = 0; i < k; ++i) {
          const double bpi = at(B, p, i), bqi = at(B, q, i);
          at(B, p, i) = c * bpi - s * bqi;
          at(B, q, i) = s * bpi + c * bqi;
        }
        for (int i = 0; i < k; ++i) {
          const double vip = at(V, i, p), viq = at(V, i, q);
          at(V, i, p) = c * vip - s * viq;
          at(V, i, q) = s * vip + c * viq;
        }
      }
    }
  }
  values.resize(k);
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  Vector diag(k);
  for (int i = 0; i < k; ++i) diag[i] = at(B, i, i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return diag[a] > diag[b]; });
  std::vector<double> Vs(V.size());
  for (int c = 0; c < k; ++c) {
    values[c] = diag[order[c]];
    for (int i = 0; i < k; ++i) Vs[static_cast<size_t>(i) * k + c] = at(V, i, order[c]);
  }
  V.swap(Vs);
}

// Modified Gram-Schmidt with a second pass; near-null columns are
// replaced by a fresh deterministic draw.
void orthonormalize(std::vector<Vector>& cols, uint64_t refill_seed) {
  const int d = static_cast<int>(cols[0].size());
  uint64_t refill = 0;
  for (size_t c = 0; c < cols.size(); ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t p = 0; p < c; ++p) {
        const double r = dot(cols[p].data(), cols[c].data(), d);
        for (int i = 0; i < d; ++i) cols[c][i] -= r * cols[p][i];
      }
    }
    double nrm = norm2(cols[c]);
    if (nrm < 1e-200) {
      for (int i = 0; i < d; ++i)
        cols[c][i] = rng::normal(refill_seed, refill * d + i);
      ++refill;
      for (int pass = 0; pass < 2; ++pass)
        for (size_t p = 0; p < c; ++p) {
          const double r = dot(cols[p].data(), cols[c].data(), d);
          for (int i = 0; i < d; ++i) cols[c][i] -= r * cols[p][i];
        }
      nrm = norm2(cols[c]);
    }
    const double inv = 1.0 / nrm;
    for (int i = 0; i < d; ++i) cols[c][i] *= inv;
  }
}

}  // namespace

EigPairs top_k_eigpairs(const Matrix& S, int k) {
  const int d = S.rows;
  if (S.rows != S.cols) throw DimensionMismatch("top_k_eigpairs: matrix is not square");
  if (k < 1 || k > d) throw DimensionMismatch("top_k_eigpairs: k out of range");

  double amax = 0.0, asym = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) amax = std::max(amax, std::fabs(S(i, j)));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      asym = std::max(asym, std::fabs(S(i, j) - S(j, i)));
  if (asym > 1e-9 * std::max(1.0, amax))
    throw NotSymmetric("top_k_eigpairs: asymmetry exceeds tolerance");

  // Row-sum shift bounds the spectrum, so S + shift I is PSD and the
  // magnitude order of its eigenvalues matches the algebraic order of S.
  double shift = 0.0;
  for (int i = 0; i < d; ++i) {
    double rs = 0.0;
    for (int j = 0; j < d; ++j) rs += std::fabs(S(i, j));
    shift = std::max(shift, rs);
  }

  constexpr int kBudget = 10000;
  constexpr double kTol = 1e-9;
  const uint64_t seed = 0x0e16a5eedULL;

  std::vector<Vector> Q(k, Vector(d));
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < d; ++i)
      Q[c][i] = rng::normal(seed, static_cast<uint64_t>(c) * d + i);
  orthonormalize(Q, rng::derive(seed, 1));

  std::vector<Vector> Z(k, Vector(d));
  std::vector<double> B(static_cast<size_t>(k) * k);
  Vector ritz;
  std::vector<double> U;

  for (int it = 0; it < kBudget; ++it) {
    for (int c = 0; c < k; ++c)
      for (int i = 0; i < d; ++i) Z[c][i] = dot(S.row(i), Q[c].data(), d);

    // Rayleigh-Ritz on the current block
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) {
        const double v = dot(Q[a].data(), Z[b].data(), d);
        B[static_cast<size_t>(a) * k + b] = v;
        B[static_cast<size_t>(b) * k + a] = v;
      }
    std::vector<double> Bc = B;
    jacobi_sym_eig(Bc, k, ritz, U);

    bool ok = true;
    for (int c = 0; c < k && ok; ++c) {
      double rsq = 0.0;
      for (int i = 0; i < d; ++i) {
        double zi = 0.0, vi = 0.0;
        for (int a = 0; a < k; ++a) {
          const double u = U[static_cast<size_t>(a) * k + c];
          zi += Z[a][i] * u;
          vi += Q[a][i] * u;
        }
        const double r = zi - ritz[c] * vi;
        rsq += r * r;
      }
      ok = std::sqrt(rsq) <= kTol * (1.0 + std::fabs(ritz[c]));
    }
    if (ok) {
      EigPairs out;
      out.values = ritz;
      out.vectors = Matrix(d, k);
      for (int c = 0; c < k; ++c)
        for (int i = 0; i < d; ++i) {
          double vi = 0.0;
          for (int a = 0; a < k; ++a) vi += Q[a][i] * U[static_cast<size_t>(a) * k + c];
          out.vectors(i, c) = vi;
        }
      return out;
    }

    for (int c = 0; c < k; ++c)
      for (int i = 0; i < d; ++i) Z[c][i] += shift * Q[c][i];
    Q.swap(Z);
    orthonormalize(Q, rng::derive(seed, 2 + it));
  }
  throw NoConvergence("top_k_eigpairs: iteration budget exhausted");
}

}  // namespace mlr
