#pragma once

// Batch execution with on-disk artifacts.
//
// solve  -> solution.txt, solution.json, continuation.json, iterations.jsonl,
//           norms.csv (t,c0,c1,c2,residual), summary.json
// check  -> properties.json
// mms    -> convergence.csv (count,h,error,order,newton_iterations)
//
// Exit codes: 0 success, 1 property failure, 2 continuation failure,
// 3 spec or config error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mixhess/config.hpp"
#include "mixhess/continuation.hpp"
#include "mixhess/grid_io.hpp"
#include "mixhess/mms.hpp"
#include "mixhess/properties.hpp"

namespace mixhess {

enum ExitCode : int { kExitOk = 0, kExitPropertyFailure = 1, kExitContinuationFailure = 2, kExitSpecError = 3 };

inline constexpr const char* kOutEnv = "MIXHESS_OUT";

/// --out beats the environment, which beats the config file.
inline std::filesystem::path output_dir(const RunConfig& c, const std::optional<std::string>& cli_out) {
  if (cli_out) return *cli_out;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return c.out;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw SpecError("cannot write " + p.string());
  return os;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::ordered_json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

inline std::string csv_number(double v) {
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return s.str();
}

inline void log(const RunConfig& c, int level, const std::string& msg) {
  if (c.verbosity >= level) std::cerr << msg << '\n';
}

}  // namespace detail

struct SolveOutcome {
  int exit_code = kExitOk;
  std::optional<ContinuationResult> result;
  std::optional<double> max_error;
  std::string message;
};

inline SolveOutcome run_solve(const RunConfig& cfg, const std::filesystem::path& out) {
  SolveOutcome oc;
  nlohmann::ordered_json summary;
  summary["problem"] = cfg.problem.value_or("custom");
  summary["n"] = cfg.n;
  summary["k"] = cfg.k;
  summary["resolution"] = cfg.resolution;
  try {
    std::filesystem::create_directories(out);
    const ProblemSpec spec = build_problem(cfg);
    const auto start = std::chrono::steady_clock::now();
    auto res = continuity_solve(spec, cfg.solver);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    {
      auto os = detail::open_out(out / "solution.txt");
      write_text_dump(os, res.u, spec.k);
    }
    detail::write_json(out / "solution.json", to_json(res.u, spec.k));
    auto records = nlohmann::ordered_json::array();
    for (const auto& r : res.records) records.push_back(r.to_json());
    detail::write_json(out / "continuation.json", records);
    {
      auto os = detail::open_out(out / "iterations.jsonl");
      for (const auto& e : res.iterations) os << e.to_json().dump() << '\n';
    }
    {
      auto os = detail::open_out(out / "norms.csv");
      os << "t,c0,c1,c2,residual\n";
      for (const auto& r : res.records) {
        os << detail::csv_number(r.t) << ',' << detail::csv_number(r.norms.c0) << ','
           << detail::csv_number(r.norms.c1) << ',' << detail::csv_number(r.norms.c2) << ','
           << detail::csv_number(r.residual) << '\n';
      }
    }
    summary["converged"] = true;
    summary["verdict"] = "converged";
    summary["final_t"] = res.records.back().t;
    summary["stages"] = res.records.size() - 1;
    summary["total_newton"] = res.total_newton;
    summary["final_residual"] = res.records.back().residual;
    const auto& fin = res.records.back().norms;
    summary["norms"] = {{"c0", fin.c0}, {"c1", fin.c1}, {"c2", fin.c2}};
    if (spec.exact) {
      oc.max_error = max_error(res.u, *spec.exact);
      summary["max_error"] = *oc.max_error;
    } else {
      summary["max_error"] = nullptr;
    }
    summary["comparison_violations"] = res.comparison_violations;
    summary["wall_time"] = wall;
    oc.result = std::move(res);
    oc.exit_code = kExitOk;
  } catch (const ContinuationFailure& e) {
    summary["converged"] = false;
    summary["verdict"] = "continuation-failure";
    summary["final_t"] = e.last_good_t();
    summary["message"] = e.what();
    oc.exit_code = kExitContinuationFailure;
    oc.message = e.what();
  } catch (const SpecError& e) {
    oc.exit_code = kExitSpecError;
    oc.message = e.what();
  } catch (const DomainError& e) {
    oc.exit_code = kExitSpecError;
    oc.message = e.what();
  }
  if (oc.exit_code == kExitSpecError) {
    summary["converged"] = false;
    summary["verdict"] = "spec-error";
    summary["message"] = oc.message;
  }
  summary["exit_code"] = oc.exit_code;
  if (!oc.message.empty()) std::cerr << "mixhess: " << oc.message << '\n';
  try {
    detail::write_json(out / "summary.json", summary);
  } catch (const SpecError& e) {
    std::cerr << "mixhess: " << e.what() << '\n';
    oc.exit_code = kExitSpecError;
  }
  return oc;
}

/// Property counts: config "samples" replaces every default count.
inline PropertyCounts property_counts(const RunConfig& cfg) {
  return cfg.samples ? PropertyCounts::uniform(*cfg.samples) : PropertyCounts{};
}

inline int run_properties(const RunConfig& cfg, const std::filesystem::path& out, PropertyReport* report_out = nullptr) {
  try {
    std::filesystem::create_directories(out);
    const auto chi = make_chi(cfg.chi, static_cast<std::size_t>(cfg.n));
    const auto report = run_property_suite(cfg.seed, property_counts(cfg), chi);
    detail::write_json(out / "properties.json", report.to_json());
    for (const auto& p : report.properties) {
      detail::log(cfg, 1,
                  (p.ok() ? "pass  " : "FAIL  ") + p.name + "  " + std::to_string(p.passed) + "/" +
                      std::to_string(p.samples));
      if (!p.ok() && p.failing_sample) std::cerr << "  failing sample: " << p.failing_sample->dump() << '\n';
    }
    const bool ok = report.all_pass();
    if (report_out) *report_out = report;
    return ok ? kExitOk : kExitPropertyFailure;
  } catch (const SpecError& e) {
    std::cerr << "mixhess: " << e.what() << '\n';
    return kExitSpecError;
  }
}

struct MmsOutcome {
  int exit_code = kExitOk;
  std::vector<ConvergenceLevel> levels;
};

inline MmsOutcome run_mms(const RunConfig& cfg, const std::filesystem::path& out) {
  MmsOutcome oc;
  try {
    if (!cfg.manufactured) throw SpecError("mms needs a manufactured problem");
    if (cfg.grids.size() < 2) throw SpecError("mms needs at least two grid levels");
    std::filesystem::create_directories(out);
    oc.levels = convergence_study([&](int count) { return build_problem(cfg, count); }, cfg.grids, cfg.solver);
    auto os = detail::open_out(out / "convergence.csv");
    os << "count,h,error,order,newton_iterations\n";
    for (const auto& l : oc.levels) {
      os << l.count << ',' << detail::csv_number(l.h) << ',' << detail::csv_number(l.error) << ','
         << (std::isnan(l.order) ? std::string() : detail::csv_number(l.order)) << ',' << l.newton_iterations << '\n';
    }
    for (const auto& l : oc.levels) {
      detail::log(cfg, 1,
                  "grid " + std::to_string(l.count) + "  error " + detail::csv_number(l.error) +
                      (std::isnan(l.order) ? "" : "  order " + detail::csv_number(l.order)));
    }
  } catch (const ContinuationFailure& e) {
    std::cerr << "mixhess: " << e.what() << '\n';
    oc.exit_code = kExitContinuationFailure;
  } catch (const SpecError& e) {
    std::cerr << "mixhess: " << e.what() << '\n';
    oc.exit_code = kExitSpecError;
  } catch (const DomainError& e) {
    std::cerr << "mixhess: " << e.what() << '\n';
    oc.exit_code = kExitSpecError;
  }
  return oc;
}

/// Config source: a built-in name or a path to a JSON file.
inline RunConfig load_config(const std::string& source) {
  for (const auto& name : builtin_names()) {
    if (source == name) return parse_config(nlohmann::json{{"problem", name}});
  }
  std::ifstream is(source);
  if (!is) throw ConfigError("no built-in problem or readable file named '" + source + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mixhess
