#pragma once

// Second-order perturbation chi(x, z, p) added to the Hessian: U = D^2 u + chi(x, u, Du).

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixhess/sym_tensor.hpp"

namespace mixhess {

/// Constants for the growth bounds
///   p . grad_x chi^{xi xi}(x, p)  <= psi1 |xi|^2 (1 + |p|^gamma1)
///   |chi^{xi eta}(x, p)|^2        <= psi2 |xi| |eta| (1 + |p|^gamma2)
/// with psi1, psi2 > 0 and gamma1, gamma2 in (0, 2).
struct GrowthBounds {
  double psi1 = 1.0;
  double psi2 = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
};

/// Pluggable chi with its z- and p-derivatives.
///
/// Callbacks must be reentrant: the solver may evaluate them from several
/// threads on disjoint grid nodes.
struct ChiSpec {
  using Point = std::span<const double>;
  using TensorFn = std::function<SymTensor(Point x, double z, Point p)>;
  using TensorListFn = std::function<std::vector<SymTensor>(Point x, double z, Point p)>;

  std::string name;
  std::size_t n = 0;
  TensorFn value;
  TensorFn dz;        ///< d chi / dz
  TensorListFn dp;    ///< d chi / dp_s, s = 0..n-1
  bool depends_on_z = true;
  bool depends_on_p = true;
  std::optional<GrowthBounds> growth;

  static ChiSpec zero(std::size_t n) { return constant(SymTensor(n), "zero"); }

  /// chi = C, independent of (x, z, p).
  static ChiSpec constant(SymTensor c, std::string name = "constant") {
    ChiSpec chi;
    chi.name = std::move(name);
    chi.n = c.dim();
    const std::size_t n = chi.n;
    chi.value = [c](Point, double, Point) { return c; };
    chi.dz = [n](Point, double, Point) { return SymTensor(n); };
    chi.dp = [n](Point, double, Point) { return std::vector<SymTensor>(n, SymTensor(n)); };
    chi.depends_on_z = false;
    chi.depends_on_p = false;
    return chi;
  }

  /// chi^{ij} = scale * z * delta_ij.
  static ChiSpec linear_z(std::size_t n, double scale = 1.0) {
    ChiSpec chi;
    chi.name = scale == 1.0 ? "z-identity" : "linear-z";
    chi.n = n;
    chi.value = [n, scale](Point, double z, Point) { return SymTensor::scaled_identity(n, scale * z); };
    chi.dz = [n, scale](Point, double, Point) { return SymTensor::scaled_identity(n, scale); };
    chi.dp = [n](Point, double, Point) { return std::vector<SymTensor>(n, SymTensor(n)); };
    chi.depends_on_p = false;
    return chi;
  }

  /// chi^{ij} = -|p|^2 delta_ij: concave in p, but grows like |p|^4 in the
  /// squared bound, so it violates the second growth condition for gamma2 < 2.
  static ChiSpec neg_p_squared(std::size_t n) {
    ChiSpec chi;
    chi.name = "neg-p-squared";
    chi.n = n;
    chi.value = [n](Point, double, Point p) {
      double s = 0.0;
      for (double v : p) s += v * v;
      return SymTensor::scaled_identity(n, -s);
    };
    chi.dz = [n](Point, double, Point) { return SymTensor(n); };
    chi.dp = [n](Point, double, Point p) {
      std::vector<SymTensor> out;
      out.reserve(n);
      for (std::size_t s = 0; s < n; ++s) out.push_back(SymTensor::scaled_identity(n, -2.0 * p[s]));
      return out;
    };
    chi.depends_on_z = false;
    return chi;
  }
};

}  // namespace mixhess
