#pragma once

// Sampling-based validation of a ChiSpec against the structure conditions
//   (a) xi -> chi^{xi xi}(x, z, p) concave in p,
//   (b) chi^{xi xi}_z >= 0,
// and, when growth constants are supplied, the two growth bounds of
// GrowthBounds. The conditions are universally quantified, so this can only
// find counterexamples, never prove them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixhess/chi.hpp"
#include "mixhess/errors.hpp"
#include "mixhess/random.hpp"

namespace mixhess {

struct SamplePlan {
  std::size_t count = 256;
  std::vector<double> p_radii{0.1, 1.0, 10.0};
  std::size_t random_directions = 8;
  std::vector<double> lower;  ///< x-box; defaults to [-1,1]^n when empty
  std::vector<double> upper;
  double z_lo = -1.0;
  double z_hi = 1.0;
  std::uint64_t seed = 1;
  double tolerance = 1e-10;
};

struct ValidationEntry {
  std::size_t sample = 0;
  std::string check;
  double margin = 0.0;
  bool pass = true;
};

struct CheckSummary {
  std::string check;
  std::size_t evaluations = 0;
  std::size_t failures = 0;
  double worst_margin = 0.0;
  ValidationEntry worst;
};

struct ValidationReport {
  std::string chi_name;
  std::vector<CheckSummary> checks;
  std::vector<ValidationEntry> violations;  ///< capped at kMaxViolations, worst first
  bool growth_checked = false;

  static constexpr std::size_t kMaxViolations = 64;

  const CheckSummary* find(const std::string& id) const {
    for (const auto& c : checks) {
      if (c.check == id) return &c;
    }
    return nullptr;
  }

  bool passed(const std::string& id) const {
    const auto* c = find(id);
    return c == nullptr || c->failures == 0;
  }

  /// Concavity in p and chi_z >= 0.
  bool structure_ok() const { return passed("p-concavity") && passed("z-monotone"); }
  bool growth_ok() const { return growth_checked && passed("growth-gradient") && passed("growth-magnitude"); }

  nlohmann::ordered_json to_json() const {
    auto entry = [](const ValidationEntry& e) {
      nlohmann::ordered_json j;
      j["sample"] = e.sample;
      j["check"] = e.check;
      j["margin"] = e.margin;
      j["pass"] = e.pass;
      return j;
    };
    nlohmann::ordered_json j;
    j["chi"] = chi_name;
    j["structure_pass"] = structure_ok();
    j["growth_checked"] = growth_checked;
    if (growth_checked) j["growth_pass"] = growth_ok();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json cj;
      cj["check"] = c.check;
      cj["evaluations"] = c.evaluations;
      cj["failures"] = c.failures;
      cj["worst_margin"] = c.worst_margin;
      cj["worst"] = entry(c.worst);
      arr.push_back(std::move(cj));
    }
    j["checks"] = std::move(arr);
    auto viol = nlohmann::ordered_json::array();
    for (const auto& v : violations) viol.push_back(entry(v));
    j["violations"] = std::move(viol);
    return j;
  }
};

namespace detail {

class ReportBuilder {
 public:
  explicit ReportBuilder(ValidationReport& r) : report_(r) {}

  void record(const std::string& id, std::size_t sample, double margin, double tol) {
    auto it = std::find_if(report_.checks.begin(), report_.checks.end(),
                           [&](const CheckSummary& c) { return c.check == id; });
    if (it == report_.checks.end()) {
      report_.checks.push_back(CheckSummary{id, 0, 0, margin, {sample, id, margin, true}});
      it = std::prev(report_.checks.end());
    }
    const bool pass = margin >= -tol;
    ++it->evaluations;
    ValidationEntry e{sample, id, margin, pass};
    if (margin < it->worst_margin || it->evaluations == 1) {
      it->worst_margin = margin;
      it->worst = e;
    }
    if (!pass) {
      ++it->failures;
      report_.violations.push_back(e);
    }
  }

  void finish() {
    std::stable_sort(report_.violations.begin(), report_.violations.end(),
                     [](const ValidationEntry& a, const ValidationEntry& b) { return a.margin < b.margin; });
    if (report_.violations.size() > ValidationReport::kMaxViolations) {
      report_.violations.resize(ValidationReport::kMaxViolations);
    }
  }

 private:
  ValidationReport& report_;
};

inline std::string describe_sample(std::span<const double> x, double z, std::span<const double> p) {
  std::ostringstream os;
  os.precision(17);
  os << "x=(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ") z=" << z << " p=(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ")";
  return os.str();
}

template <class F>
auto guarded(F&& f, std::span<const double> x, double z, std::span<const double> p) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw ChiCallbackError(std::string("chi callback failed at ") + describe_sample(x, z, p) + ": " + e.what());
  }
}

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

inline ValidationReport validate_chi(const ChiSpec& chi, const SamplePlan& plan) {
  const std::size_t n = chi.n;
  ValidationReport report;
  report.chi_name = chi.name;
  report.growth_checked = chi.growth.has_value();
  detail::ReportBuilder builder(report);

  std::vector<double> lower = plan.lower.empty() ? std::vector<double>(n, -1.0) : plan.lower;
  std::vector<double> upper = plan.upper.empty() ? std::vector<double>(n, 1.0) : plan.upper;
  if (lower.size() != n || upper.size() != n) throw DomainError("validate_chi: sample box dimension mismatch");
  if (plan.p_radii.empty()) throw DomainError("validate_chi: at least one p radius required");

  Rng rng(plan.seed);
  std::vector<std::vector<double>> directions;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    directions.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < plan.random_directions; ++i) directions.push_back(rng.unit_vector(n));

  const double tol = plan.tolerance;
  for (std::size_t s = 0; s < plan.count; ++s) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(lower[i], upper[i]);
    const double z = rng.uniform(plan.z_lo, plan.z_hi);
    const double radius = plan.p_radii[s % plan.p_radii.size()];
    std::vector<double> p = rng.unit_vector(n);
    for (double& v : p) v *= radius;
    std::vector<double> p2 = rng.unit_vector(n);
    for (std::size_t i = 0; i < n; ++i) p2[i] = p[i] + radius * p2[i];
    std::vector<double> pm(n);
    for (std::size_t i = 0; i < n; ++i) pm[i] = 0.5 * (p[i] + p2[i]);

    const auto value = [&](std::span<const double> xx, std::span<const double> pp) {
      return detail::guarded([&] { return chi.value(xx, z, pp); }, xx, z, pp);
    };
    const SymTensor c1 = value(x, p);
    const SymTensor c2 = value(x, p2);
    const SymTensor cm = value(x, pm);
    const SymTensor cz = detail::guarded([&] { return chi.dz(x, z, p); }, x, z, p);

    for (const auto& xi : directions) {
      const double a = c1.contract(xi, xi);
      const double b = c2.contract(xi, xi);
      const double m = cm.contract(xi, xi);
      const double scale = 1.0 + std::max({std::abs(a), std::abs(b), std::abs(m)});
      builder.record("p-concavity", s, (m - 0.5 * (a + b)) / scale, tol);
      builder.record("z-monotone", s, cz.contract(xi, xi), tol);
    }

    if (chi.growth) {
      const auto& g = *chi.growth;
      const double pnorm = detail::norm(p);
      // p . grad_x chi^{xi xi}: central differences in x.
      std::vector<SymTensor> dx;
      for (std::size_t i = 0; i < n; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        dx.push_back((1.0 / (2.0 * h)) * (value(xp, p) - value(xm, p)));
      }
      for (const auto& xi : directions) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < n; ++i) lhs += p[i] * dx[i].contract(xi, xi);
        const double xi2 = detail::norm(xi) * detail::norm(xi);
        const double rhs = g.psi1 * xi2 * (1.0 + std::pow(pnorm, g.gamma1));
        builder.record("growth-gradient", s, (rhs - lhs) / (1.0 + std::abs(rhs)), 1e-6);
      }
      for (std::size_t a = 0; a < directions.size(); ++a) {
        for (std::size_t b = a; b < directions.size(); ++b) {
          const double c = c1.contract(directions[a], directions[b]);
          const double rhs = g.psi2 * detail::norm(directions[a]) * detail::norm(directions[b]) *
                             (1.0 + std::pow(pnorm, g.gamma2));
          builder.record("growth-magnitude", s, (rhs - c * c) / (1.0 + rhs), tol);
        }
      }
    }
  }
  builder.finish();
  return report;
}

}  // namespace mixhess
