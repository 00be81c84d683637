// mixhess command line.
//
//   mixhess solve <config>              continuation solve
//   mixhess check <config>              seeded property suite
//   mixhess mms <name> --grids 9,17     manufactured-solution convergence study
//
// <config> is a built-in problem name or a JSON file. MIXHESS_OUT overrides
// the configured output directory; --out overrides both.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mixhess/driver.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> tol_newton;
  std::optional<double> dt;
  std::optional<double> tau;
  std::vector<int> grids;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--tol-newton", o.tol_newton, "Newton residual tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--dt", o.dt, "initial continuation step")->check(CLI::Range(1e-12, 1.0));
  sub->add_option("--tau", o.tau, "admissibility margin factor")->check(CLI::NonNegativeNumber);
}

mixhess::RunConfig apply(mixhess::RunConfig c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.tol_newton) c.solver.tol_newton = *o.tol_newton;
  if (o.dt) c.solver.dt = *o.dt;
  if (o.tau) c.solver.tau = *o.tau;
  if (!o.grids.empty()) c.grids = o.grids;
  mixhess::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed Hessian equation solver and property checker"};
  app.require_subcommand(1);

  Overrides o;
  std::string source;

  auto* solve = app.add_subcommand("solve", "solve a Dirichlet problem by continuation");
  solve->add_option("config", source, "built-in problem name or JSON file")->required();
  add_common(solve, o);

  auto* check = app.add_subcommand("check", "run the seeded property suite");
  check->add_option("config", source, "built-in problem name or JSON file")->required();
  add_common(check, o);

  auto* mms = app.add_subcommand("mms", "convergence study on a manufactured problem");
  mms->add_option("name", source, "built-in problem name or JSON file")->required();
  mms->add_option("--grids", o.grids, "grid point counts per axis")->delimiter(',');
  add_common(mms, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mixhess::kExitSpecError;
  }

  mixhess::RunConfig cfg;
  try {
    cfg = apply(mixhess::load_config(source), o);
  } catch (const mixhess::SpecError& e) {
    std::cerr << "mixhess: " << e.what() << '\n';
    return mixhess::kExitSpecError;
  }
  const auto out = mixhess::output_dir(cfg, o.out);

  if (*solve) {
    const auto oc = mixhess::run_solve(cfg, out);
    if (oc.exit_code == 0 && cfg.verbosity >= 1) {
      std::cerr << "converged: " << oc.result->total_newton << " Newton iterations";
      if (oc.max_error) std::cerr << ", max error " << *oc.max_error;
      std::cerr << '\n';
    }
    return oc.exit_code;
  }
  if (*check) return mixhess::run_properties(cfg, out);
  return mixhess::run_mms(cfg, out).exit_code;
}
