#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "mixhess/errors.hpp"

namespace mixhess {

/// Dense symmetric n x n tensor. Writes go through set()/add(), which keep
/// both triangles identical, so entries(i,j) == entries(j,i) exactly.
class SymTensor {
 public:
  SymTensor() = default;
  explicit SymTensor(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  /// From full row-major storage; throws if not exactly symmetric or not finite.
  SymTensor(std::size_t n, std::vector<double> row_major) : n_(n), data_(std::move(row_major)) {
    if (data_.size() != n * n) throw DomainError("SymTensor: storage size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(data_[i * n + j])) throw DomainError("SymTensor: non-finite entry");
        if (data_[i * n + j] != data_[j * n + i]) throw DomainError("SymTensor: input is not symmetric");
      }
    }
  }

  SymTensor(std::initializer_list<std::initializer_list<double>> rows) {
    n_ = rows.size();
    data_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) throw DomainError("SymTensor: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
    *this = SymTensor(n_, std::move(data_));
  }

  static SymTensor identity(std::size_t n) { return scaled_identity(n, 1.0); }

  static SymTensor scaled_identity(std::size_t n, double c) {
    SymTensor t(n);
    for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = c;
    return t;
  }

  static SymTensor diagonal(std::span<const double> d) {
    SymTensor t(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) t.data_[i * d.size() + i] = d[i];
    return t;
  }

  static SymTensor diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  /// Symmetric outer product v v^T.
  static SymTensor outer(std::span<const double> v) {
    SymTensor t(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) t.data_[i * v.size() + j] = v[i] * v[j];
    }
    return t;
  }

  std::size_t dim() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }

  void add(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] += v;
    if (i != j) data_[j * n_ + i] += v;
  }

  std::span<const double> row_major() const noexcept { return data_; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += data_[i * n_ + i];
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  /// Quadratic form xi^T W eta.
  double contract(std::span<const double> xi, std::span<const double> eta) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) s += xi[i] * data_[i * n_ + j] * eta[j];
    }
    return s;
  }

  /// Frobenius inner product sum_ij A_ij B_ij.
  double dot(const SymTensor& other) const {
    double s = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) s += data_[i] * other.data_[i];
    return s;
  }

  SymTensor& operator+=(const SymTensor& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  SymTensor& operator*=(double c) {
    for (double& v : data_) v *= c;
    return *this;
  }

  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double c, SymTensor a) { return a *= c; }
  friend SymTensor operator*(SymTensor a, double c) { return a *= c; }

  friend bool operator==(const SymTensor&, const SymTensor&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Max absolute entry difference.
inline double max_abs_diff(const SymTensor& a, const SymTensor& b) {
  double m = 0.0;
  const auto ra = a.row_major();
  const auto rb = b.row_major();
  for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::abs(ra[i] - rb[i]));
  return m;
}

}  // namespace mixhess
