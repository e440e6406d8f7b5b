#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fedpart/equilibrium.hpp"
#include "fedpart/lp.hpp"

using namespace fedpart;

namespace {

LinearProgram one_var(std::vector<Constraint> rows) {
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {1.0};
  lp.constraints = std::move(rows);
  return lp;
}

/// Random LP with a known feasible point x0 and a bounding row sum(x) <= M.
LinearProgram random_feasible(std::mt19937_64& gen, std::vector<double>* x0_out) {
  std::uniform_int_distribution<int> dims(1, 6);
  std::uniform_real_distribution<double> coef(-3.0, 3.0), pos(0.0, 2.0);
  const std::size_t n = dims(gen), m = dims(gen);
  std::vector<double> x0(n);
  for (auto& v : x0) v = std::bernoulli_distribution(0.3)(gen) ? 0.0 : pos(gen);

  LinearProgram lp;
  lp.num_vars = n;
  for (std::size_t j = 0; j < n; ++j) lp.objective.push_back(coef(gen));
  for (std::size_t k = 0; k < m; ++k) {
    Constraint row;
    double lhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row.coeffs.push_back(coef(gen));
      lhs += row.coeffs.back() * x0[j];
    }
    if (std::bernoulli_distribution(0.25)(gen)) {
      row.sense = Sense::Equal;
      row.rhs = lhs;
    } else {
      row.rhs = lhs - pos(gen);
    }
    lp.constraints.push_back(row);
  }
  Constraint bound{std::vector<double>(n, -1.0), Sense::GreaterEqual, -10.0};
  double sum = 0.0;
  for (double v : x0) sum += v;
  bound.rhs = -(sum + 10.0);
  lp.constraints.push_back(bound);
  *x0_out = x0;
  return lp;
}

TEST(LpSolve, SingleFeasiblePoint) {
  const auto sol = solve(one_var({{{1.0}, Sense::Equal, 1.0}}));
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.x[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.objective_value, 1.0, 1e-12);
}

TEST(LpSolve, ContradictoryBoundsAreInfeasible) {
  const auto sol = solve(one_var({{{1.0}, Sense::GreaterEqual, 2.0}, {{-1.0}, Sense::GreaterEqual, -1.0}}));
  EXPECT_EQ(sol.status, LpStatus::Infeasible);
}

TEST(LpSolve, UnboundedDetected) {
  const auto sol = solve(one_var({{{1.0}, Sense::GreaterEqual, 1.0}}));
  EXPECT_EQ(sol.status, LpStatus::Unbounded);
}

TEST(LpSolve, NonFiniteInputIsUsageError) {
  EXPECT_THROW(solve(one_var({{{std::nan("")}, Sense::Equal, 1.0}})), UsageError);
  auto lp = one_var({{{1.0}, Sense::Equal, 1.0}});
  lp.objective[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(solve(lp), UsageError);
}

TEST(LpSolve, IterationCapIsNumericalError) {
  LinearProgram lp;
  lp.num_vars = 3;
  lp.objective = {1.0, 2.0, 3.0};
  lp.constraints = {{{-1.0, -1.0, -1.0}, Sense::GreaterEqual, -4.0}, {{1.0, 0.0, 1.0}, Sense::GreaterEqual, 1.0}};
  Tolerances tol;
  tol.iteration_cap = 1;
  EXPECT_THROW(solve(lp, tol), NumericalError);
}

TEST(LpSolve, GpmTwoDeviceInstance) {
  const auto prog = build_gpm(make_devices({500, 500}), GameParams{});
  const auto sol = solve(prog.filtered());
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective_value, 0.95148, 1e-5);
}

TEST(LpSolve, DualCertificatesOnKnownProblem) {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x, y >= 0 -> (4, 0), value 12.
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {3.0, 2.0};
  lp.constraints = {{{-1.0, -1.0}, Sense::GreaterEqual, -4.0}, {{-1.0, -3.0}, Sense::GreaterEqual, -6.0}};
  const auto sol = solve(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective_value, 12.0, 1e-12);
  EXPECT_NEAR(sol.x[0], 4.0, 1e-12);
  EXPECT_NEAR(sol.dual[0], -3.0, 1e-12);
  EXPECT_NEAR(sol.dual[1], 0.0, 1e-12);
  EXPECT_LE(sol.certificates.gap, 1e-9);
}

TEST(CheckFeasible, TrivialVertexHasZeroResiduals) {
  const auto lp = one_var({{{1.0}, Sense::Equal, 1.0}});
  const auto r = check_feasible(lp, {1.0});
  EXPECT_TRUE(r.feasible);
  for (double v : r.residuals) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.max_violation, 0.0);
}

TEST(CheckFeasible, NegativeEntryNamesBound) {
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {1.0, 1.0};
  lp.constraints = {{{1.0, 1.0}, Sense::Equal, 0.0}};
  const auto r = check_feasible(lp, {0.5, -0.5});
  EXPECT_FALSE(r.feasible);
  EXPECT_NE(r.worst.find("x[1]"), std::string::npos);
}

TEST(CheckFeasible, LengthMismatch) {
  EXPECT_THROW(check_feasible(one_var({{{1.0}, Sense::Equal, 1.0}}), {1.0, 2.0}), UsageError);
}

TEST(LpProperties, RandomFeasibleProblems) {
  std::mt19937_64 gen(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x0;
    const LinearProgram lp = random_feasible(gen, &x0);
    const auto sol = solve(lp);
    ASSERT_EQ(sol.status, LpStatus::Optimal) << "trial " << trial;
    EXPECT_TRUE(check_feasible(lp, sol.x).feasible) << "trial " << trial;
    double at_x0 = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) at_x0 += lp.objective[j] * x0[j];
    EXPECT_GE(sol.objective_value, at_x0 - 1e-9) << "trial " << trial;
  }
}

TEST(LpProperties, DeterministicResolve) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x0;
    const LinearProgram lp = random_feasible(gen, &x0);
    const auto a = solve(lp);
    const auto b = solve(lp);
    ASSERT_EQ(a.x, b.x);
    EXPECT_EQ(a.objective_value, b.objective_value);
  }
}

TEST(LpProperties, ObjectiveScaling) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x0;
    LinearProgram lp = random_feasible(gen, &x0);
    const auto base = solve(lp);
    const double lambda = 3.75;
    for (double& c : lp.objective) c *= lambda;
    const auto scaled = solve(lp);
    EXPECT_NEAR(scaled.objective_value, lambda * base.objective_value, 1e-8 * (1 + std::abs(scaled.objective_value)));
    double base_x_on_scaled = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) base_x_on_scaled += lp.objective[j] * base.x[j];
    EXPECT_NEAR(base_x_on_scaled, scaled.objective_value, 1e-8 * (1 + std::abs(scaled.objective_value)));
  }
}

}  // namespace
