#pragma once

// Seeded property suites over the symmetric functions and the operator G,
// aggregated into a deterministic JSON report.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixhess/chi_validation.hpp"
#include "mixhess/hessian_operator.hpp"
#include "mixhess/sampling.hpp"
#include "mixhess/symmetric_functions.hpp"

namespace mixhess {

struct PropertyResult {
  PropertyResult() = default;
  explicit PropertyResult(std::string n) : name(std::move(n)) {}

  std::string name;
  std::size_t samples = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<nlohmann::ordered_json> failing_sample;

  /// Record one evaluation; margin >= 0 means pass (strict > 0 when strict).
  template <class SampleFn>
  void record(double margin, SampleFn&& describe, bool strict = false) {
    ++samples;
    const bool ok = strict ? margin > 0.0 : margin >= 0.0;
    if (!(margin >= worst_margin)) worst_margin = margin;
    if (ok) {
      ++passed;
    } else {
      ++failed;
      if (!failing_sample) failing_sample = describe();
    }
  }

  bool ok() const { return failed == 0; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["samples"] = samples;
    j["passed"] = passed;
    j["failed"] = failed;
    if (samples > 0 && std::isfinite(worst_margin)) j["worst_margin"] = worst_margin;
    else j["worst_margin"] = nullptr;
    if (failing_sample) j["failing_sample"] = *failing_sample;
    return j;
  }
};

struct PropertyReport {
  std::uint64_t seed = 0;
  std::vector<PropertyResult> properties;

  std::size_t total_samples() const {
    std::size_t s = 0;
    for (const auto& p : properties) s += p.samples;
    return s;
  }
  bool all_pass() const {
    return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.ok(); });
  }
  bool vacuous() const { return total_samples() == 0; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["total_samples"] = total_samples();
    j["vacuous"] = vacuous();
    j["all_pass"] = all_pass();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : properties) arr.push_back(p.to_json());
    j["properties"] = std::move(arr);
    return j;
  }
};

/// Default sample counts; a single override replaces all of them.
struct PropertyCounts {
  std::size_t sigma_oracle = 500;
  std::size_t cone_nesting = 500;
  std::size_t symmetry = 50;  ///< each with 20 permutations
  std::size_t sigma_gradient = 200;
  std::size_t newton_maclaurin = 1000;
  std::size_t operator_samples = 1000;  ///< trace, ellipticity, concavity
  std::size_t operator_gradient = 200;
  std::size_t rotation = 200;
  std::size_t forms = 200;
  std::size_t degeneracy = 1;
  std::size_t chi_samples = 256;

  static PropertyCounts uniform(std::size_t c) {
    return {c, c, c, c, c, c, c, c, c, std::min<std::size_t>(c, 1), c};
  }
};

namespace detail {

/// Subset-enumeration sigma_k; independent of the prefix recurrence.
inline double sigma_by_enumeration(int k, std::span<const double> lambda) {
  const std::size_t n = lambda.size();
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) prod *= lambda[i];
    }
    total += prod;
  }
  return total;
}

inline nlohmann::ordered_json lambda_json(std::span<const double> l) { return std::vector<double>(l.begin(), l.end()); }

inline nlohmann::ordered_json tensor_json(const SymTensor& u) {
  return std::vector<double>(u.row_major().begin(), u.row_major().end());
}

inline std::vector<double> random_alphas(int k, Rng& rng) {
  std::vector<double> a(static_cast<std::size_t>(k - 1));
  for (auto& x : a) x = rng.uniform(0.05, 1.0);
  return a;
}

inline const std::vector<std::pair<int, int>>& operator_cases_trace() {
  static const std::vector<std::pair<int, int>> c{{3, 3}, {5, 3}, {5, 4}};
  return c;
}

inline const std::vector<std::pair<int, int>>& operator_cases_gradient() {
  static const std::vector<std::pair<int, int>> c{{3, 3}, {4, 3}, {5, 4}};
  return c;
}

}  // namespace detail

/// Central-difference matrix derivative of G in each symmetric direction,
/// compared against G^{ij}; returns the Frobenius relative error.
inline double operator_gradient_error(const SymTensor& u, const OperatorParams& p, double step = 1e-6) {
  const auto ev = eval_G(u, p);
  const std::size_t n = u.dim();
  SymTensor fd(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      SymTensor up = u, um = u;
      up.add(i, j, step);
      um.add(i, j, -step);
      const double d = (eval_G_value(up, p) - eval_G_value(um, p)) / (2.0 * step);
      // Perturbing U_ij and U_ji together moves G by 2 G^{ij} off the diagonal.
      fd.set(i, j, i == j ? d : 0.5 * d);
    }
  }
  return (fd - ev.gradient).frobenius_norm() / std::max(1.0, ev.gradient.frobenius_norm());
}

inline PropertyResult property_sigma_oracle(std::size_t count, Rng& rng) {
  PropertyResult r{"sigma-oracle-equivalence"};
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t n = 2 + rng.index(5);
    const auto lambda = rng.uniform_vector(n, -3.0, 3.0);
    double worst = 0.0;
    for (int k = 0; k <= static_cast<int>(n); ++k) {
      const double exact = detail::sigma_by_enumeration(k, lambda);
      const double err = std::abs(sigma(k, lambda) - exact) / std::max(std::abs(exact), 1e-300);
      worst = std::max(worst, exact == 0.0 ? std::abs(sigma(k, lambda)) : err);
    }
    r.record(1e-12 - worst, [&] { return nlohmann::ordered_json{{"lambda", detail::lambda_json(lambda)}}; });
  }
  return r;
}

inline PropertyResult property_cone_nesting(std::size_t count, Rng& rng) {
  PropertyResult r{"cone-nesting"};
  const ConeSampler sampler;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t n = 2 + rng.index(5);
    // Alternate unconstrained points with points drawn inside some cone.
    const auto lambda = s % 2 == 0 ? rng.uniform_vector(n, -3.0, 3.0)
                                   : sampler(1 + static_cast<int>(rng.index(n)), n, rng).vector();
    bool ok = true;
    for (int m = 1; m <= static_cast<int>(n); ++m) {
      if (!in_cone(m, lambda)) continue;
      for (int mp = 1; mp < m; ++mp) ok = ok && in_cone(mp, lambda);
    }
    r.record(ok ? 0.0 : -1.0, [&] { return nlohmann::ordered_json{{"lambda", detail::lambda_json(lambda)}}; });
  }
  return r;
}

inline PropertyResult property_symmetry(std::size_t count, Rng& rng) {
  PropertyResult r{"permutation-symmetry"};
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t n = 2 + rng.index(5);
    const auto lambda = rng.uniform_vector(n, -3.0, 3.0);
    std::vector<double> abs_lambda(n);
    for (std::size_t i = 0; i < n; ++i) abs_lambda[i] = std::abs(lambda[i]);
    const auto base = elementary_symmetric(lambda, static_cast<int>(n));
    const auto scale = elementary_symmetric(abs_lambda, static_cast<int>(n));
    double worst = 0.0;
    for (int perm = 0; perm < 20; ++perm) {
      auto p = lambda;
      for (std::size_t i = n - 1; i > 0; --i) std::swap(p[i], p[rng.index(i + 1)]);
      const auto sp = elementary_symmetric(p, static_cast<int>(n));
      for (std::size_t k = 0; k <= n; ++k) worst = std::max(worst, std::abs(sp[k] - base[k]) / scale[k]);
    }
    r.record(1e-12 - worst, [&] { return nlohmann::ordered_json{{"lambda", detail::lambda_json(lambda)}}; });
  }
  return r;
}

inline PropertyResult property_sigma_gradient(std::size_t count, Rng& rng) {
  PropertyResult r{"sigma-gradient-fd"};
  const double h = 1e-6;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t n = 2 + rng.index(5);
    const int k = 1 + static_cast<int>(rng.index(n));
    auto lambda = rng.uniform_vector(n, -3.0, 3.0);
    const auto g = sigma_gradient(k, lambda);
    double err = 0.0, gmax = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto lp = lambda, lm = lambda;
      lp[i] += h;
      lm[i] -= h;
      const double fd = (sigma(k, lp) - sigma(k, lm)) / (2 * h);
      err = std::max(err, std::abs(fd - g[i]));
      gmax = std::max(gmax, std::abs(g[i]));
    }
    r.record(1e-6 - err / gmax,
             [&] { return nlohmann::ordered_json{{"k", k}, {"lambda", detail::lambda_json(lambda)}}; });
  }
  return r;
}

inline PropertyResult property_newton_maclaurin(std::size_t count, Rng& rng) {
  PropertyResult r{"newton-maclaurin"};
  const ConeSampler sampler;
  const std::vector<std::pair<int, int>> cases{{3, 2}, {4, 3}, {5, 4}};
  for (std::size_t s = 0; s < count; ++s) {
    const auto [n, m] = cases[s % cases.size()];
    const auto lambda = sampler(m, static_cast<std::size_t>(n), rng);
    double worst = std::numeric_limits<double>::infinity();
    std::array<int, 3> worst_idx{};
    for (int l = 0; l < m; ++l) {
      for (int rr = 1; rr <= m; ++rr) {
        for (int ss = 0; ss < rr && ss <= l; ++ss) {
          const double gap = newton_maclaurin_gap(m, l, rr, ss, lambda);
          if (gap < worst) {
            worst = gap;
            worst_idx = {l, rr, ss};
          }
        }
      }
    }
    r.record(worst + 1e-10, [&] {
      return nlohmann::ordered_json{{"m", m}, {"l", worst_idx[0]}, {"r", worst_idx[1]}, {"s", worst_idx[2]},
                                    {"lambda", detail::lambda_json(lambda.values())}};
    });
  }
  return r;
}

/// Trace bound, ellipticity and concavity on shared samples.
inline std::vector<PropertyResult> property_operator_structure(std::size_t count, Rng& rng) {
  PropertyResult trace{"trace-lower-bound"}, ell{"ellipticity"}, conc{"concavity"};
  for (std::size_t s = 0; s < count; ++s) {
    const auto [n, k] = detail::operator_cases_trace()[s % 3];
    const OperatorParams p{n, k, detail::random_alphas(k, rng)};
    const SymTensor u1 = random_admissible(static_cast<std::size_t>(n), k, rng);
    const SymTensor u2 = random_admissible(static_cast<std::size_t>(n), k, rng);
    const auto ev = eval_G(u1, p);
    auto describe = [&] {
      return nlohmann::ordered_json{{"n", n}, {"k", k}, {"alphas", p.alphas}, {"U1", detail::tensor_json(u1)},
                                    {"U2", detail::tensor_json(u2)}};
    };
    trace.record(ev.trace - trace_lower_bound(p) + 1e-10, describe);
    ell.record(ev.min_ellipticity, describe, true);
    conc.record(concavity_gap(u1, u2, 0.5, p) + 1e-10, describe);
  }
  return {trace, ell, conc};
}

inline PropertyResult property_operator_gradient(std::size_t count, Rng& rng) {
  PropertyResult r{"operator-gradient-fd"};
  for (const auto& [n, k] : detail::operator_cases_gradient()) {
    for (std::size_t s = 0; s < count; ++s) {
      const OperatorParams p{n, k, detail::random_alphas(k, rng)};
      const SymTensor u = random_admissible(static_cast<std::size_t>(n), k, rng);
      const double err = operator_gradient_error(u, p);
      r.record(1e-6 - err, [&] {
        return nlohmann::ordered_json{{"n", n}, {"k", k}, {"alphas", p.alphas}, {"U", detail::tensor_json(u)}};
      });
    }
  }
  return r;
}

inline PropertyResult property_rotation(std::size_t count, Rng& rng) {
  PropertyResult r{"rotation-invariance"};
  for (std::size_t s = 0; s < count; ++s) {
    const auto [n, k] = detail::operator_cases_gradient()[s % 3];
    const OperatorParams p{n, k, detail::random_alphas(k, rng)};
    const SymTensor u = random_admissible(static_cast<std::size_t>(n), k, rng);
    const auto q = random_orthogonal(static_cast<std::size_t>(n), rng);
    const double d = std::abs(eval_G_value(rotate(u, q), p) - eval_G_value(u, p));
    r.record(1e-10 - d, [&] { return nlohmann::ordered_json{{"n", n}, {"k", k}, {"U", detail::tensor_json(u)}}; });
  }
  return r;
}

/// sigma_k - sum_{l<=k-1} alpha_l sigma_l  ==  (G - alpha_{k-1}) sigma_{k-1}.
inline PropertyResult property_forms(std::size_t count, Rng& rng) {
  PropertyResult r{"equation-forms-equivalence"};
  for (std::size_t s = 0; s < count; ++s) {
    const auto [n, k] = detail::operator_cases_gradient()[s % 3];
    const OperatorParams p{n, k, detail::random_alphas(k, rng)};
    const double alpha_top = rng.uniform(-1.0, 1.0);
    const SymTensor u = random_admissible(static_cast<std::size_t>(n), k, rng);
    const auto dec = eigen(u);
    const auto sig = elementary_symmetric(dec.eigenvalues.values(), k);
    double direct = sig[k] - alpha_top * sig[k - 1];
    double scale = std::abs(sig[k]) + std::abs(alpha_top * sig[k - 1]);
    for (int l = 0; l <= k - 2; ++l) {
      direct -= p.alphas[l] * sig[l];
      scale += std::abs(p.alphas[l] * sig[l]);
    }
    const double quotient = (eval_G_value(u, p) - alpha_top) * sig[k - 1];
    r.record(1e-10 - std::abs(direct - quotient) / std::max(1.0, scale),
             [&] { return nlohmann::ordered_json{{"n", n}, {"k", k}, {"U", detail::tensor_json(u)}}; });
  }
  return r;
}

/// Path lambda_t = (1, 1, t) toward the Gamma_2 boundary t = -1/2 with
/// sigma_2 = 1 + 2t shrinking geometrically to 1e-8.
inline std::vector<EigenvalueVector> degeneracy_path(std::size_t points = 200, double final_sigma = 1e-8) {
  std::vector<EigenvalueVector> path;
  const double s0 = 3.0;  // sigma_2 at t = 1
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(points - 1);
    const double s2 = s0 * std::pow(final_sigma / s0, frac);
    path.push_back(EigenvalueVector{1.0, 1.0, 0.5 * (s2 - 1.0)});
  }
  return path;
}

inline PropertyResult property_degeneracy(std::size_t count) {
  PropertyResult r{"degeneracy-barrier"};
  if (count == 0) return r;
  const auto path = degeneracy_path();
  const auto g = degeneracy_probe(path, OperatorParams{3, 3, {0.5, 0.5}});
  bool decreasing = true;
  for (std::size_t i = path.size() / 2; i + 1 < g.size(); ++i) decreasing = decreasing && g[i + 1] < g[i];
  r.record(decreasing ? -1e3 - g.back() : -1.0, [&] {
    return nlohmann::ordered_json{{"alphas", {0.5, 0.5}}, {"final_G", g.back()}};
  });
  const auto q = degeneracy_probe(path, OperatorParams{3, 3, {0.0, 0.0}});
  r.record(-q.back(), [&] { return nlohmann::ordered_json{{"alphas", {0.0, 0.0}}, {"final_G", q.back()}}; });
  return r;
}

/// Structure checks on the built-in chi choices plus the caller's own chi.
inline std::vector<PropertyResult> property_chi_validation(std::size_t count, std::uint64_t seed,
                                                           const std::optional<ChiSpec>& configured = std::nullopt) {
  PropertyResult structure{"chi-structure-conditions"}, detect{"chi-growth-violation-detected"};
  if (count == 0) return {structure, detect};
  SamplePlan plan;
  plan.count = count;
  plan.seed = seed;
  std::vector<ChiSpec> chis{ChiSpec::zero(3), ChiSpec::linear_z(3)};
  if (configured) chis.push_back(*configured);
  for (const auto& chi : chis) {
    const auto rep = validate_chi(chi, plan);
    structure.record(rep.structure_ok() ? 0.0 : -1.0, [&] { return rep.to_json(); });
  }
  auto bad = ChiSpec::neg_p_squared(3);
  bad.growth = GrowthBounds{1.0, 1.0, 1.0, 1.0};
  const auto rep = validate_chi(bad, plan);
  structure.record(rep.structure_ok() ? 0.0 : -1.0, [&] { return rep.to_json(); });
  // Negative control: the |p|^4 growth must be caught.
  detect.record(rep.passed("growth-magnitude") ? -1.0 : 0.0, [&] { return rep.to_json(); });
  return {structure, detect};
}

inline PropertyReport run_property_suite(std::uint64_t seed, const PropertyCounts& counts = {},
                                         const std::optional<ChiSpec>& configured_chi = std::nullopt) {
  PropertyReport report;
  report.seed = seed;
  std::uint64_t stream = 0;
  auto next = [&] { return Rng(seed * 1000003ULL + ++stream); };
  auto add = [&](PropertyResult r) { report.properties.push_back(std::move(r)); };
  {
    auto rng = next();
    add(property_sigma_oracle(counts.sigma_oracle, rng));
  }
  {
    auto rng = next();
    add(property_cone_nesting(counts.cone_nesting, rng));
  }
  {
    auto rng = next();
    add(property_symmetry(counts.symmetry, rng));
  }
  {
    auto rng = next();
    add(property_sigma_gradient(counts.sigma_gradient, rng));
  }
  {
    auto rng = next();
    add(property_newton_maclaurin(counts.newton_maclaurin, rng));
  }
  {
    auto rng = next();
    for (auto& r : property_operator_structure(counts.operator_samples, rng)) add(std::move(r));
  }
  {
    auto rng = next();
    add(property_operator_gradient(counts.operator_gradient, rng));
  }
  {
    auto rng = next();
    add(property_rotation(counts.rotation, rng));
  }
  {
    auto rng = next();
    add(property_forms(counts.forms, rng));
  }
  add(property_degeneracy(counts.degeneracy));
  for (auto& r : property_chi_validation(counts.chi_samples, seed, configured_chi)) add(std::move(r));
  return report;
}

}  // namespace mixhess
