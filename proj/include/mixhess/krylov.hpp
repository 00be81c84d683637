#pragma once

// Sparse CSR storage, right-preconditioned restarted GMRES with a diagonal
// (Jacobi) preconditioner, and a dense LU fallback for small systems.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mixhess/errors.hpp"

namespace mixhess {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Duplicate (row, col) entries are summed.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t) {
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(rows + 1, 0);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i].row >= rows || t[i].col >= cols) throw DomainError("CsrMatrix: triplet out of range");
      if (!m.col_.empty() && i > 0 && t[i].row == t[i - 1].row && t[i].col == t[i - 1].col) {
        m.val_.back() += t[i].value;
        continue;
      }
      m.col_.push_back(t[i].col);
      m.val_.push_back(t[i].value);
      ++m.row_ptr_[t[i].row + 1];
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return val_.size(); }

  void multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += val_[p] * x[col_[p]];
      y[r] = s;
    }
  }

  std::vector<double> operator*(std::span<const double> x) const {
    std::vector<double> y(rows_);
    multiply(x, y);
    return y;
  }

  double at(std::size_t r, std::size_t c) const {
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      if (col_[p] == c) return val_[p];
    }
    return 0.0;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(std::min(rows_, cols_), 0.0);
    for (std::size_t r = 0; r < d.size(); ++r) d[r] = at(r, r);
    return d;
  }

  std::vector<double> to_dense() const {
    std::vector<double> a(rows_ * cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) a[r * cols_ + col_[p]] = val_[p];
    }
    return a;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

struct KrylovOptions {
  std::size_t restart = 100;
  std::size_t max_iterations = 5000;
  double relative_tolerance = 1e-12;  ///< target ||b - Ax|| / ||b||
  double stagnation_threshold = 1e-8; ///< above this after max_iterations -> LinearSolveFailure
  std::size_t direct_threshold = 1000; ///< dense LU below this many unknowns
};

struct LinearSolveResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool direct = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b) {
  const auto ax = a * x;
  double r = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) r += (b[i] - ax[i]) * (b[i] - ax[i]);
  const double nb = norm2(b);
  return nb > 0.0 ? std::sqrt(r) / nb : std::sqrt(r);
}

}  // namespace detail

/// Dense LU with partial pivoting; a is row-major n x n and is overwritten.
inline std::vector<double> dense_lu_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    }
    if (a[piv * n + c] == 0.0) throw LinearSolveFailure("dense LU: singular matrix", INFINITY);
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      std::swap(b[c], b[piv]);
    }
    const double inv = 1.0 / a[c * n + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] * inv;
      if (f == 0.0) continue;
      a[r * n + c] = 0.0;
      for (std::size_t j = c + 1; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t j = c + 1; j < n; ++j) s -= a[c * n + j] * b[j];
    b[c] = s / a[c * n + c];
  }
  return b;
}

/// GMRES(m) with right Jacobi preconditioning, x0 = 0. Does not throw on
/// non-convergence; the caller decides using relative_residual.
inline LinearSolveResult gmres(const CsrMatrix& a, std::span<const double> b, const KrylovOptions& opts) {
  const std::size_t n = b.size();
  LinearSolveResult res;
  res.x.assign(n, 0.0);
  const double bnorm = detail::norm2(b);
  if (bnorm == 0.0) return res;

  std::vector<double> dinv = a.diagonal();
  for (double& d : dinv) d = d != 0.0 ? 1.0 / d : 1.0;

  const std::size_t m = std::max<std::size_t>(1, opts.restart);
  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<double> h((m + 1) * m);
  std::vector<double> cs(m), sn(m), g(m + 1), y(m), w(n), z(n);
  auto H = [&](std::size_t i, std::size_t j) -> double& { return h[i * m + j]; };

  std::vector<double> r(b.begin(), b.end());
  double beta = bnorm;
  while (res.iterations < opts.max_iterations) {
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    std::size_t j = 0;
    for (; j < m && res.iterations < opts.max_iterations; ++j) {
      ++res.iterations;
      for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * v[j][i];
      a.multiply(z, w);
      for (std::size_t i = 0; i <= j; ++i) {
        H(i, j) = detail::dot(w, v[i]);
        for (std::size_t q = 0; q < n; ++q) w[q] -= H(i, j) * v[i][q];
      }
      const double wn = detail::norm2(w);
      H(j + 1, j) = wn;
      if (wn > 0.0) {
        for (std::size_t q = 0; q < n; ++q) v[j + 1][q] = w[q] / wn;
      }
      for (std::size_t i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = denom > 0.0 ? H(j, j) / denom : 1.0;
      sn[j] = denom > 0.0 ? H(j + 1, j) / denom : 0.0;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) <= opts.relative_tolerance * bnorm || wn == 0.0) {
        ++j;
        break;
      }
    }
    // Back substitution and update x += M^{-1} V y.
    for (std::size_t i = j; i-- > 0;) {
      double s = g[i];
      for (std::size_t q = i + 1; q < j; ++q) s -= H(i, q) * y[q];
      y[i] = H(i, i) != 0.0 ? s / H(i, i) : 0.0;
    }
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t i = 0; i < j; ++i) {
      for (std::size_t q = 0; q < n; ++q) z[q] += y[i] * v[i][q];
    }
    for (std::size_t q = 0; q < n; ++q) res.x[q] += dinv[q] * z[q];

    a.multiply(res.x, w);
    for (std::size_t q = 0; q < n; ++q) r[q] = b[q] - w[q];
    beta = detail::norm2(r);
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= opts.relative_tolerance || beta == 0.0) break;
  }
  return res;
}

/// Dense LU below the direct threshold, GMRES otherwise. Throws
/// LinearSolveFailure when the final relative residual exceeds the
/// stagnation threshold.
inline LinearSolveResult solve_linear(const CsrMatrix& a, std::span<const double> b, const KrylovOptions& opts) {
  LinearSolveResult res;
  if (b.size() < opts.direct_threshold) {
    res.x = dense_lu_solve(a.to_dense(), std::vector<double>(b.begin(), b.end()));
    res.direct = true;
    res.relative_residual = detail::relative_residual(a, res.x, b);
  } else {
    res = gmres(a, b, opts);
  }
  if (!(res.relative_residual <= opts.stagnation_threshold)) {
    throw LinearSolveFailure("linear solve stagnated at relative residual " + std::to_string(res.relative_residual),
                             res.relative_residual);
  }
  return res;
}

}  // namespace mixhess
