#pragma once

// Structured grids on boxes in R^n with second-order central differences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mixhess/chi.hpp"
#include "mixhess/errors.hpp"
#include "mixhess/spectral.hpp"
#include "mixhess/sym_tensor.hpp"

namespace mixhess {

/// Axis-aligned box with a uniform per-axis grid; node values are stored
/// row-major (last axis fastest).
class Box {
 public:
  Box() = default;

  Box(std::vector<double> lower, std::vector<double> upper, std::vector<int> counts)
      : lower_(std::move(lower)), upper_(std::move(upper)), counts_(std::move(counts)) {
    const std::size_t n = lower_.size();
    if (n < 1 || upper_.size() != n || counts_.size() != n) throw DomainError("Box: dimension mismatch");
    for (std::size_t a = 0; a < n; ++a) {
      if (!(upper_[a] > lower_[a])) throw DomainError("Box: upper must exceed lower on every axis");
      if (counts_[a] < 5) throw DomainError("Box: at least 5 points per axis required");
    }
    strides_.assign(n, 1);
    for (std::size_t a = n - 1; a > 0; --a) strides_[a - 1] = strides_[a] * static_cast<std::size_t>(counts_[a]);
    size_ = strides_[0] * static_cast<std::size_t>(counts_[0]);
    spacing_.resize(n);
    for (std::size_t a = 0; a < n; ++a) spacing_[a] = (upper_[a] - lower_[a]) / (counts_[a] - 1);
  }

  static Box cube(std::size_t n, double lo, double hi, int count) {
    return Box(std::vector<double>(n, lo), std::vector<double>(n, hi), std::vector<int>(n, count));
  }

  std::size_t dim() const noexcept { return lower_.size(); }
  std::size_t size() const noexcept { return size_; }
  int count(std::size_t axis) const { return counts_[axis]; }
  double spacing(std::size_t axis) const { return spacing_[axis]; }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  const std::vector<int>& counts() const noexcept { return counts_; }

  /// Grid coordinate; the last node sits exactly on upper.
  double coordinate(std::size_t axis, int i) const {
    return i == counts_[axis] - 1 ? upper_[axis] : lower_[axis] + i * spacing_[axis];
  }

  std::vector<int> multi_index(std::size_t linear) const {
    std::vector<int> idx(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
      idx[a] = static_cast<int>(linear / strides_[a]);
      linear %= strides_[a];
    }
    return idx;
  }

  std::size_t linear_index(std::span<const int> idx) const {
    if (idx.size() != dim()) throw DomainError("Box: multi-index dimension mismatch");
    std::size_t lin = 0;
    for (std::size_t a = 0; a < dim(); ++a) {
      if (idx[a] < 0 || idx[a] >= counts_[a]) throw DomainError("Box: multi-index out of range");
      lin += static_cast<std::size_t>(idx[a]) * strides_[a];
    }
    return lin;
  }

  std::vector<double> point(std::size_t linear) const {
    const auto idx = multi_index(linear);
    std::vector<double> x(dim());
    for (std::size_t a = 0; a < dim(); ++a) x[a] = coordinate(a, idx[a]);
    return x;
  }

  bool is_interior(std::size_t linear) const {
    for (std::size_t a = 0; a < dim(); ++a) {
      const int i = static_cast<int>((linear / strides_[a]) % static_cast<std::size_t>(counts_[a]));
      if (i == 0 || i == counts_[a] - 1) return false;
    }
    return true;
  }

  std::vector<std::size_t> interior_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size_; ++i) {
      if (is_interior(i)) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> boundary_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size_; ++i) {
      if (!is_interior(i)) out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const Box& a, const Box& b) {
    return a.lower_ == b.lower_ && a.upper_ == b.upper_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<double> lower_, upper_;
  std::vector<int> counts_;
  std::vector<std::size_t> strides_;
  std::vector<double> spacing_;
  std::size_t size_ = 0;
};

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(Box box) : box_(std::move(box)), values_(box_.size(), 0.0) {}

  GridFunction(Box box, std::vector<double> values) : box_(std::move(box)), values_(std::move(values)) {
    if (values_.size() != box_.size()) throw DomainError("GridFunction: value count != grid size");
    for (double v : values_) {
      if (!std::isfinite(v)) throw DomainError("GridFunction: non-finite value");
    }
  }

  static GridFunction sample(const Box& box, const std::function<double(std::span<const double>)>& f) {
    std::vector<double> v(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) v[i] = f(box.point(i));
    return GridFunction(box, std::move(v));
  }

  const Box& box() const noexcept { return box_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }

 private:
  Box box_;
  std::vector<double> values_;
};

namespace detail {

inline void require_interior(const Box& box, std::size_t idx, const char* who) {
  if (idx >= box.size() || !box.is_interior(idx)) {
    throw DomainError(std::string(who) + ": node " + std::to_string(idx) + " is not interior");
  }
}

}  // namespace detail

/// Central-difference gradient at an interior node.
inline std::vector<double> gradient_at(const GridFunction& f, std::size_t idx) {
  const Box& box = f.box();
  detail::require_interior(box, idx, "gradient_at");
  std::vector<double> g(box.dim());
  for (std::size_t a = 0; a < box.dim(); ++a) {
    const std::size_t s = box.stride(a);
    g[a] = (f[idx + s] - f[idx - s]) / (2.0 * box.spacing(a));
  }
  return g;
}

inline std::vector<double> gradient_at(const GridFunction& f, std::span<const int> idx) {
  return gradient_at(f, f.box().linear_index(idx));
}

/// Second-difference Hessian at an interior node; cross terms use the
/// four-point stencil (f++ + f-- - f+- - f-+) / (4 h_i h_j).
inline SymTensor hessian_at(const GridFunction& f, std::size_t idx) {
  const Box& box = f.box();
  detail::require_interior(box, idx, "hessian_at");
  const std::size_t n = box.dim();
  SymTensor h(n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t sa = box.stride(a);
    const double ha = box.spacing(a);
    h.set(a, a, (f[idx + sa] - 2.0 * f[idx] + f[idx - sa]) / (ha * ha));
    for (std::size_t b = a + 1; b < n; ++b) {
      const std::size_t sb = box.stride(b);
      const double cross = f[idx + sa + sb] + f[idx - sa - sb] - f[idx + sa - sb] - f[idx - sa + sb];
      h.set(a, b, cross / (4.0 * ha * box.spacing(b)));
    }
  }
  return h;
}

inline SymTensor hessian_at(const GridFunction& f, std::span<const int> idx) {
  return hessian_at(f, f.box().linear_index(idx));
}

/// U = D^2 u + chi(x, u, Du) at an interior node.
inline SymTensor assemble_U(const GridFunction& u, const ChiSpec& chi, std::size_t idx) {
  SymTensor h = hessian_at(u, idx);
  const auto x = u.box().point(idx);
  const auto p = gradient_at(u, idx);
  h += chi.value(x, u[idx], p);
  return h;
}

struct Norms {
  double c0 = 0.0;  ///< max |u| over all nodes
  double c1 = 0.0;  ///< max |Du| over interior nodes
  double c2 = 0.0;  ///< max spectral radius of D^2 u over interior nodes
};

inline Norms norms(const GridFunction& u) {
  Norms out;
  for (double v : u.values()) out.c0 = std::max(out.c0, std::abs(v));
  const Box& box = u.box();
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!box.is_interior(i)) continue;
    double g2 = 0.0;
    for (double g : gradient_at(u, i)) g2 += g * g;
    out.c1 = std::max(out.c1, std::sqrt(g2));
    const auto dec = eigen(hessian_at(u, i));
    out.c2 = std::max({out.c2, std::abs(dec.eigenvalues[0]), std::abs(dec.eigenvalues[dec.dim() - 1])});
  }
  return out;
}

inline double max_abs_difference(const GridFunction& a, const GridFunction& b) {
  if (a.size() != b.size()) throw DomainError("max_abs_difference: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace mixhess
