#include <gtest/gtest.h>

#include "mixhess/continuation.hpp"
#include "mixhess/krylov.hpp"
#include "mixhess/mms.hpp"
#include "mixhess/random.hpp"
#include "oracles.hpp"

using namespace mixhess;

namespace {

const char* kQuad = "(x1^2 + x2^2 + x3^2)/2";

std::vector<ScalarField> alphas(double a0, double a1) {
  return {ScalarField::from_constant(a0, 3), ScalarField::from_constant(a1, 3)};
}

ProblemSpec quadratic_problem(int count, double bump, const ChiSpec& chi = ChiSpec::zero(3)) {
  const Box box = Box::cube(3, -1.0, 1.0, count);
  const auto u_star = ScalarField::from_expression(kQuad, 3);
  return mms_problem(u_star, chi, 3, alphas(0.3, 0.1), box, bump_subsolution(u_star, box, bump), "quadratic");
}

std::vector<double> target_of(const ProblemSpec& spec) { return rhs_field(spec); }

CsrMatrix random_system(std::size_t n, Rng& rng) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 4.0 + rng.uniform()});
    for (int k = 0; k < 4; ++k) t.push_back({i, rng.index(n), rng.uniform(-0.5, 0.5)});
  }
  return CsrMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST(Csr, DuplicatesSum) {
  const auto a = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, -1.0}, {1, 1, 5.0}});
  EXPECT_EQ(a.at(0, 0), 3.0);
  EXPECT_EQ(a.at(0, 1), 0.0);
  EXPECT_EQ(a.at(1, 0), -1.0);
  const std::vector<double> x{1.0, 2.0};
  EXPECT_EQ(a * x, (std::vector<double>{3.0, 9.0}));
}

TEST(Krylov, DirectAndGmresAgreeWithOracle) {
  Rng rng(41);
  const std::size_t n = 60;
  const auto a = random_system(n, rng);
  const auto b = rng.uniform_vector(n, -1.0, 1.0);
  const auto dense = a.to_dense();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = dense[i * n + j];
  }
  const auto ref = oracle::gauss_jordan(rows, b);

  KrylovOptions direct;
  const auto d = solve_linear(a, b, direct);
  EXPECT_TRUE(d.direct);
  KrylovOptions iterative;
  iterative.direct_threshold = 0;
  iterative.restart = 10;
  const auto g = solve_linear(a, b, iterative);
  EXPECT_FALSE(g.direct);
  EXPECT_LE(g.relative_residual, 1e-12);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(d.x[i], ref[i], 1e-12);
    EXPECT_NEAR(g.x[i], ref[i], 1e-10);
  }
}

TEST(Krylov, StagnationRaises) {
  Rng rng(42);
  const auto a = random_system(200, rng);
  const auto b = rng.uniform_vector(200, -1.0, 1.0);
  KrylovOptions opts;
  opts.direct_threshold = 0;
  opts.restart = 2;
  opts.max_iterations = 2;
  EXPECT_THROW(solve_linear(a, b, opts), LinearSolveFailure);
}

TEST(Mms, ConstantRightHandSideForQuadratic) {
  const auto spec = quadratic_problem(7, 0.0);
  for (std::size_t idx : spec.box.interior_nodes()) EXPECT_NEAR(spec.rhs(spec.box.point(idx)), 0.4 / 3.0, 1e-15);
}

TEST(Mms, DiagonalHessianQuotient) {
  const Box box = Box::cube(3, -1.0, 1.0, 5);
  const auto u = ScalarField::from_expression("(x1^2 + 2*x2^2 + 3*x3^2)/2", 3);
  const auto spec = mms_problem(u, ChiSpec::zero(3), 3, alphas(0.3, 0.1), box);
  EXPECT_NEAR(spec.rhs(box.point(62)), 5.1 / 11.0, 1e-15);
}

TEST(Mms, LinearZChiVariesWithX) {
  const Box box = Box::cube(3, -1.0, 1.0, 5);
  const auto u = ScalarField::from_expression(kQuad, 3);
  const auto spec = mms_problem(u, ChiSpec::linear_z(3), 3, alphas(0.3, 0.1), box);
  for (std::size_t idx : {31u, 62u, 100u}) {
    const auto x = box.point(idx);
    const double c = 1.0 + 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double ref = oracle::G({c, c, c}, 3, {0.3, 0.1});
    EXPECT_NEAR(spec.rhs(x), ref, 1e-14);
  }
  EXPECT_NE(spec.rhs(box.point(31)), spec.rhs(box.point(62)));
}

TEST(Mms, InadmissibleManufacturedSolution) {
  const Box box = Box::cube(3, -1.0, 1.0, 5);
  const auto u = ScalarField::from_expression("-(x1^2 + x2^2 + x3^2)/2", 3);
  EXPECT_THROW(mms_problem(u, ChiSpec::zero(3), 3, alphas(0.3, 0.1), box), SpecError);
}

TEST(Linearize, RowsForQuadraticAndZeroChi) {
  const auto spec = quadratic_problem(5, 0.0);
  const auto target = target_of(spec);
  const auto lin = linearize(spec.subsolution, spec, target);
  const Box& box = spec.box;
  const auto g = eval_G(SymTensor::identity(3), {3, 3, {0.3, 0.1}}).gradient;
  for (std::size_t idx : box.boundary_nodes()) EXPECT_EQ(lin.jacobian.at(idx, idx), 1.0);
  for (std::size_t idx : box.interior_nodes()) {
    const double h2 = box.spacing(0) * box.spacing(0);
    EXPECT_NEAR(lin.jacobian.at(idx, idx), -2.0 * g.trace() / h2, 1e-12);
    EXPECT_NEAR(lin.jacobian.at(idx, idx + box.stride(0)), g(0, 0) / h2, 1e-12);
    EXPECT_NEAR(lin.residual[idx], 0.0, 1e-14);
  }
}

TEST(Linearize, MatchesDirectionalDerivative) {
  Rng rng(43);
  for (const auto& chi : {ChiSpec::zero(3), ChiSpec::linear_z(3), ChiSpec::neg_p_squared(3)}) {
    const Box box = Box::cube(3, -0.5, 0.5, 6);
    const auto u_star = ScalarField::from_expression("(x1^2 + x2^2 + x3^2)/2 + 0.05*sin(x1)*sin(x2)*sin(x3)", 3);
    const auto spec = mms_problem(u_star, chi, 3, alphas(0.3, 0.1), box);
    const auto target = target_of(spec);
    auto u = spec.subsolution;
    for (std::size_t idx : box.interior_nodes()) u[idx] += rng.uniform(-1e-3, 1e-3);
    const auto lin = linearize(u, spec, target);
    std::vector<double> du(u.size(), 0.0);
    for (std::size_t idx : box.interior_nodes()) du[idx] = rng.uniform(-1.0, 1.0);
    const auto jdu = lin.jacobian * du;
    const double eps = 1e-6;
    auto up = u, um = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
      up[i] += eps * du[i];
      um[i] -= eps * du[i];
    }
    const auto rp = residual_map(up, spec, target);
    const auto rm = residual_map(um, spec, target);
    double num = 0.0, den = 0.0;
    for (std::size_t idx : box.interior_nodes()) {
      const double fd = (rp.residual[idx] - rm.residual[idx]) / (2.0 * eps);
      num = std::max(num, std::abs(fd - jdu[idx]));
      den = std::max(den, std::abs(fd));
    }
    EXPECT_LE(num / den, 1e-5) << chi.name;
  }
}

TEST(Linearize, InadmissibleNodesListed) {
  const auto spec = quadratic_problem(5, 0.0);
  auto u = spec.subsolution;
  const std::size_t center = spec.box.size() / 2;
  u[center] += 5.0;  // makes the centre Hessian strongly negative
  try {
    (void)linearize(u, spec, target_of(spec));
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    EXPECT_FALSE(e.nodes().empty());
    EXPECT_NE(std::find(e.nodes().begin(), e.nodes().end(), center), e.nodes().end());
  }
}

TEST(Newton, ExactStartTakesNoSteps) {
  const auto spec = quadratic_problem(7, 0.0);
  const auto res = newton_solve(spec.subsolution, target_of(spec), spec);
  EXPECT_EQ(res.iterations, 0);
  EXPECT_LE(res.residual, 1e-10);
  EXPECT_EQ(res.log.size(), 1u);
}

TEST(Newton, InadmissibleStartRejected) {
  const auto spec = quadratic_problem(7, 0.0);
  auto u = spec.subsolution;
  u[spec.box.size() / 2] += 5.0;
  EXPECT_THROW(newton_solve(u, target_of(spec), spec), AdmissibilityError);
}

TEST(Newton, QuadraticFromSubsolutionWithinTenIterations) {
  const auto spec = quadratic_problem(9, 0.05);
  SolverOptions opts;
  const auto res = newton_solve(spec.subsolution, target_of(spec), spec, opts);
  EXPECT_LE(res.iterations, 10);
  EXPECT_LE(res.residual, 1e-10);
  // Admissibility margin and monotone residual along the log.
  for (std::size_t i = 0; i < res.log.size(); ++i) {
    EXPECT_GT(res.log[i].min_sigma_margin, 0.0);
    if (i > 0) EXPECT_LT(res.log[i].residual, res.log[i - 1].residual);
  }
  EXPECT_LE(max_error(res.u, *spec.exact), 1e-8);
}

TEST(Continuation, ConstantTargetNeedsNoNewton) {
  const auto spec = quadratic_problem(7, 0.0);
  const auto res = continuity_solve(spec);
  EXPECT_EQ(res.records.back().t, 1.0);
  for (const auto& r : res.records) EXPECT_LE(r.newton_iters, 1);
  EXPECT_EQ(res.total_newton, 0);
}

TEST(Continuation, QuadraticRecoveredExactly) {
  const auto spec = quadratic_problem(9, 0.05);
  const auto res = continuity_solve(spec);
  EXPECT_EQ(res.records.front().t, 0.0);
  EXPECT_EQ(res.records.back().t, 1.0);
  EXPECT_LE(res.records.back().residual, 1e-10);
  EXPECT_LE(max_error(res.u, *spec.exact), 1e-8);
  EXPECT_EQ(res.comparison_violations, 0u);
  for (std::size_t i = 1; i < res.records.size(); ++i) EXPECT_GT(res.records[i].t, res.records[i - 1].t);
  const auto fin = res.records.back().norms;
  for (const auto& r : res.records) {
    EXPECT_LE(r.norms.c0, 10.0 * fin.c0);
    EXPECT_LE(r.norms.c1, 10.0 * fin.c1);
    EXPECT_LE(r.norms.c2, 10.0 * fin.c2);
  }
}

TEST(Continuation, ConstantChiTensorRecoveredExactly) {
  const auto chi = ChiSpec::constant(SymTensor::diagonal({0.5, 0.0, 0.25}));
  const auto spec = quadratic_problem(7, 0.02, chi);
  const auto res = continuity_solve(spec);
  EXPECT_LE(max_error(res.u, *spec.exact), 1e-8);
}

TEST(Continuation, SubsolutionInvariants) {
  auto spec = quadratic_problem(7, 0.05);
  {
    auto bad = spec;
    bad.subsolution[0] += 1e-12;  // boundary node
    EXPECT_THROW(continuity_solve(bad), SpecError);
  }
  {
    auto bad = spec;
    bad.subsolution = GridFunction::sample(spec.box, bump_subsolution(*spec.exact, spec.box, -0.05).value);
    EXPECT_THROW(continuity_solve(bad), SpecError);  // a supersolution
  }
  {
    auto bad = spec;
    bad.subsolution = GridFunction::sample(spec.box, bump_subsolution(*spec.exact, spec.box, -5.0).value);
    EXPECT_THROW(continuity_solve(bad), SpecError);  // inadmissible
  }
}

TEST(Continuation, StepUnderflowReportsLastGoodT) {
  const auto spec = quadratic_problem(7, 0.05);
  SolverOptions opts;
  opts.max_newton = 0;
  opts.dt = 0.5;
  opts.dt_min = 0.2;
  try {
    (void)continuity_solve(spec, opts);
    FAIL() << "expected ContinuationFailure";
  } catch (const ContinuationFailure& e) {
    EXPECT_EQ(e.last_good_t(), 0.0);
  }
}

TEST(Continuation, Deterministic) {
  const auto spec = quadratic_problem(7, 0.05);
  const auto a = continuity_solve(spec);
  const auto b = continuity_solve(spec);
  ASSERT_EQ(a.u.size(), b.u.size());
  for (std::size_t i = 0; i < a.u.size(); ++i) EXPECT_EQ(a.u[i], b.u[i]);
  EXPECT_EQ(a.total_newton, b.total_newton);
}
