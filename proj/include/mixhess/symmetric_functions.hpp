#pragma once

// Elementary symmetric polynomials sigma_k, their restrictions sigma_k(lambda|i),
// and membership in the Garding cones Gamma_m.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "mixhess/errors.hpp"

namespace mixhess {

/// Ordered real n-vector of eigenvalues, n >= 2, all entries finite.
class EigenvalueVector {
 public:
  EigenvalueVector() = default;

  explicit EigenvalueVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw DomainError("EigenvalueVector: length must be at least 2, got " +
                        std::to_string(values_.size()));
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw DomainError("EigenvalueVector: non-finite entry");
    }
  }

  EigenvalueVector(std::initializer_list<double> values)
      : EigenvalueVector(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const EigenvalueVector&, const EigenvalueVector&) = default;

 private:
  std::vector<double> values_;
};

/// sigma_0..sigma_kmax of lambda by the prefix recurrence
/// sigma_j^{(m)} = sigma_j^{(m-1)} + lambda_m sigma_{j-1}^{(m-1)}.
/// Entries with j > lambda.size() are zero.
inline std::vector<double> elementary_symmetric(std::span<const double> lambda, int kmax) {
  std::vector<double> s(static_cast<std::size_t>(kmax) + 1, 0.0);
  s[0] = 1.0;
  int filled = 0;
  for (double x : lambda) {
    filled = std::min(filled + 1, kmax);
    for (int j = filled; j >= 1; --j) s[j] += x * s[j - 1];
  }
  return s;
}

namespace detail {

inline void check_order(int k, std::size_t n, const char* who) {
  if (k < 0 || static_cast<std::size_t>(k) > n) {
    throw DomainError(std::string(who) + ": order " + std::to_string(k) +
                      " outside [0, " + std::to_string(n) + "]");
  }
}

inline std::vector<double> drop_entry(std::span<const double> lambda, std::size_t i) {
  std::vector<double> rest;
  rest.reserve(lambda.size() - 1);
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (j != i) rest.push_back(lambda[j]);
  }
  return rest;
}

}  // namespace detail

inline double sigma(int k, std::span<const double> lambda) {
  detail::check_order(k, lambda.size(), "sigma");
  return elementary_symmetric(lambda, k)[static_cast<std::size_t>(k)];
}

inline double sigma(int k, const EigenvalueVector& lambda) { return sigma(k, lambda.values()); }

/// sigma_k of lambda with entry i removed (equivalently, set to zero).
inline double sigma_restricted(int k, std::span<const double> lambda, std::size_t i) {
  if (i >= lambda.size()) {
    throw DomainError("sigma_restricted: index " + std::to_string(i) + " out of range");
  }
  detail::check_order(k, lambda.size() - 1, "sigma_restricted");
  const auto rest = detail::drop_entry(lambda, i);
  return elementary_symmetric(rest, k)[static_cast<std::size_t>(k)];
}

inline double sigma_restricted(int k, const EigenvalueVector& lambda, std::size_t i) {
  return sigma_restricted(k, lambda.values(), i);
}

/// Table R with R[i][j] = sigma_j(lambda|i) for j = 0..kmax (kmax <= n-1).
inline std::vector<std::vector<double>> restricted_table(std::span<const double> lambda, int kmax) {
  detail::check_order(kmax, lambda.size() - 1, "restricted_table");
  std::vector<std::vector<double>> table;
  table.reserve(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    table.push_back(elementary_symmetric(detail::drop_entry(lambda, i), kmax));
  }
  return table;
}

/// d sigma_k / d lambda_i = sigma_{k-1}(lambda|i).
inline std::vector<double> sigma_gradient(int k, std::span<const double> lambda) {
  if (k < 1 || static_cast<std::size_t>(k) > lambda.size()) {
    throw DomainError("sigma_gradient: order " + std::to_string(k) + " outside [1, n]");
  }
  std::vector<double> grad(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) grad[i] = sigma_restricted(k - 1, lambda, i);
  return grad;
}

inline std::vector<double> sigma_gradient(int k, const EigenvalueVector& lambda) {
  return sigma_gradient(k, lambda.values());
}

/// lambda in Gamma_m: sigma_i(lambda) > 0 strictly for 1 <= i <= m.
inline bool in_cone(int m, std::span<const double> lambda) {
  if (m < 1 || static_cast<std::size_t>(m) > lambda.size()) {
    throw DomainError("in_cone: order " + std::to_string(m) + " outside [1, n]");
  }
  const auto s = elementary_symmetric(lambda, m);
  for (int i = 1; i <= m; ++i) {
    if (!(s[i] > 0.0)) return false;
  }
  return true;
}

inline bool in_cone(int m, const EigenvalueVector& lambda) { return in_cone(m, lambda.values()); }

/// Binomial coefficient C(n, k) as a double.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

/// Slack in the generalized Newton-MacLaurin inequality
///   [ (s_m/C(n,m)) / (s_l/C(n,l)) ]^{1/(m-l)} <= [ (s_r/C(n,r)) / (s_s/C(n,s)) ]^{1/(r-s)}
/// returned as right side minus left side; nonnegative on Gamma_m.
inline double newton_maclaurin_gap(int m, int l, int r, int s, std::span<const double> lambda) {
  const int n = static_cast<int>(lambda.size());
  if (!(m > l && l >= 0 && r > s && s >= 0 && m >= r && l >= s && m <= n)) {
    throw DomainError("newton_maclaurin_gap: indices must satisfy m > l >= 0, r > s >= 0, m >= r, l >= s, m <= n");
  }
  if (!in_cone(m, lambda)) throw DomainError("newton_maclaurin_gap: lambda not in Gamma_m");
  const auto sig = elementary_symmetric(lambda, m);
  auto normalized = [&](int j) { return sig[j] / binomial(n, j); };
  const double lhs = std::pow(normalized(m) / normalized(l), 1.0 / (m - l));
  const double rhs = std::pow(normalized(r) / normalized(s), 1.0 / (r - s));
  return rhs - lhs;
}

inline double newton_maclaurin_gap(int m, int l, int r, int s, const EigenvalueVector& lambda) {
  return newton_maclaurin_gap(m, l, r, s, lambda.values());
}

}  // namespace mixhess
