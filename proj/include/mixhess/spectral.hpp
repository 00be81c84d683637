#pragma once

// Cyclic Jacobi eigen-decomposition for the small dense symmetric tensors
// that appear pointwise (n <= 8), plus the metric square root used to take
// eigenvalues of a (0,2)-tensor with respect to a metric g.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mixhess/errors.hpp"
#include "mixhess/sym_tensor.hpp"
#include "mixhess/symmetric_functions.hpp"

namespace mixhess {

struct SpectralDecomposition {
  EigenvalueVector eigenvalues;  ///< ascending
  std::vector<double> vectors;   ///< n x n, row-major, column m is the eigenvector of eigenvalues[m]

  std::size_t dim() const noexcept { return eigenvalues.size(); }
  double vector(std::size_t i, std::size_t m) const { return vectors[i * dim() + m]; }

  std::vector<double> column(std::size_t m) const {
    std::vector<double> v(dim());
    for (std::size_t i = 0; i < dim(); ++i) v[i] = vector(i, m);
    return v;
  }

  /// V diag(f) V^T.
  SymTensor compose(std::span<const double> f) const {
    const std::size_t n = dim();
    SymTensor out(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) s += vector(i, m) * f[m] * vector(j, m);
        out.set(i, j, s);
      }
    }
    return out;
  }

  SymTensor reconstruct() const { return compose(eigenvalues.values()); }
};

inline constexpr double kJacobiRelativeTolerance = 1e-14;
inline constexpr int kJacobiMaxSweeps = 100;

inline SpectralDecomposition eigen(const SymTensor& w) {
  const std::size_t n = w.dim();
  if (n < 2) throw DomainError("eigen: dimension must be at least 2");
  if (!w.all_finite()) throw DomainError("eigen: non-finite input");

  std::vector<double> a(w.row_major().begin(), w.row_major().end());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto at = [n](std::vector<double>& m, std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };

  const double threshold = kJacobiRelativeTolerance * w.frobenius_norm();
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) off += a[i * n + j] * a[i * n + j];
      }
    }
    if (std::sqrt(off) <= threshold) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(a, k, p);
          const double akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(a, p, k);
          const double aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        at(a, p, q) = 0.0;
        at(a, q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = at(v, k, p);
          const double vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });

  std::vector<double> lambda(n);
  std::vector<double> vecs(n * n);
  for (std::size_t m = 0; m < n; ++m) {
    lambda[m] = a[order[m] * n + order[m]];
    for (std::size_t i = 0; i < n; ++i) vecs[i * n + m] = v[i * n + order[m]];
  }
  return {EigenvalueVector(std::move(lambda)), std::move(vecs)};
}

/// gamma with gamma * gamma = g^{-1}, for symmetric positive definite g.
inline SymTensor metric_sqrt_inverse(const SymTensor& g) {
  const auto dec = eigen(g);
  const double lmax = dec.eigenvalues[dec.dim() - 1];
  std::vector<double> f(dec.dim());
  for (std::size_t m = 0; m < dec.dim(); ++m) {
    const double l = dec.eigenvalues[m];
    if (!(lmax > 0.0) || l <= 1e-12 * lmax) {
      throw DomainError("metric_sqrt_inverse: metric is not positive definite");
    }
    f[m] = 1.0 / std::sqrt(l);
  }
  return dec.compose(f);
}

/// Plain matrix product a * b * a for symmetric a, b (result symmetrized by
/// taking the upper triangle).
inline SymTensor congruence(const SymTensor& a, const SymTensor& b) {
  const std::size_t n = a.dim();
  std::vector<double> ab(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
      ab[i * n + j] = s;
    }
  }
  SymTensor out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += ab[i * n + k] * a(k, j);
      out.set(i, j, s);
    }
  }
  return out;
}

/// Eigenvalues of W with respect to the metric g: eigen(gamma W gamma).
inline SpectralDecomposition eigen_wrt_metric(const SymTensor& w, const SymTensor& g) {
  if (w.dim() != g.dim()) throw DomainError("eigen_wrt_metric: dimension mismatch");
  return eigen(congruence(metric_sqrt_inverse(g), w));
}

}  // namespace mixhess
