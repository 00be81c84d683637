#pragma once

// Seeded generators for cone points, rotations and admissible tensors.
//
// Cone points are drawn as lambda = c * 1 + perturbation and rejected until
// they lie in Gamma_m, with c uniform in [c_lo, c_hi] and each perturbation
// entry uniform in [-spread, spread].

#include <cmath>
#include <vector>

#include "mixhess/random.hpp"
#include "mixhess/sym_tensor.hpp"
#include "mixhess/symmetric_functions.hpp"

namespace mixhess {

struct ConeSampler {
  double c_lo = 0.5;
  double c_hi = 2.0;
  double spread = 1.5;
  int max_rejections = 100000;

  EigenvalueVector operator()(int m, std::size_t n, Rng& rng) const {
    for (int attempt = 0; attempt < max_rejections; ++attempt) {
      const double c = rng.uniform(c_lo, c_hi);
      std::vector<double> lambda(n);
      for (auto& l : lambda) l = c + rng.uniform(-spread, spread);
      if (in_cone(m, lambda)) return EigenvalueVector(std::move(lambda));
    }
    throw DomainError("ConeSampler: rejection sampling exhausted");
  }
};

/// Haar-ish random orthogonal matrix (row-major) by Gram-Schmidt on Gaussians.
inline std::vector<double> random_orthogonal(std::size_t n, Rng& rng) {
  std::vector<double> q(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    for (;;) {
      std::vector<double> v(n);
      for (auto& x : v) x = rng.normal();
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < c; ++p) {
          double d = 0.0;
          for (std::size_t i = 0; i < n; ++i) d += v[i] * q[i * n + p];
          for (std::size_t i = 0; i < n; ++i) v[i] -= d * q[i * n + p];
        }
      }
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-8) continue;
      for (std::size_t i = 0; i < n; ++i) q[i * n + c] = v[i] / norm;
      break;
    }
  }
  return q;
}

/// Q diag(lambda) Q^T.
inline SymTensor rotate_diagonal(std::span<const double> lambda, std::span<const double> q) {
  const std::size_t n = lambda.size();
  SymTensor out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < n; ++m) s += q[i * n + m] * lambda[m] * q[j * n + m];
      out.set(i, j, s);
    }
  }
  return out;
}

/// Q W Q^T for symmetric W.
inline SymTensor rotate(const SymTensor& w, std::span<const double> q) {
  const std::size_t n = w.dim();
  std::vector<double> qw(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < n; ++m) s += q[i * n + m] * w(m, j);
      qw[i * n + j] = s;
    }
  }
  SymTensor out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < n; ++m) s += qw[i * n + m] * q[j * n + m];
      out.set(i, j, s);
    }
  }
  return out;
}

/// Random U with lambda(U) in Gamma_{k-1}.
inline SymTensor random_admissible(std::size_t n, int k, Rng& rng, const ConeSampler& sampler = {}) {
  const auto lambda = sampler(k - 1, n, rng);
  const auto q = random_orthogonal(n, rng);
  return rotate_diagonal(lambda.values(), q);
}

/// Random symmetric tensor with entries uniform in [-scale, scale].
inline SymTensor random_symmetric(std::size_t n, Rng& rng, double scale = 1.0) {
  SymTensor out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) out.set(i, j, rng.uniform(-scale, scale));
  }
  return out;
}

}  // namespace mixhess
