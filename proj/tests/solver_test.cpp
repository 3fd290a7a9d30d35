#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "prodsdp/library.hpp"
#include "prodsdp/solver.hpp"

using namespace prodsdp;

namespace {

// Values below come from an independent solve of the same program files
// with cvxpy + Clarabel (tests/oracle/solve_programs.py) and are frozen.
constexpr double kThetaPetersen = 4.0;
constexpr double kThetaG6 = 3.0;  // tests/data/g6.graph
constexpr double kGammaMixed = 1.4142135624;
constexpr double kSigmaXor = 0.8535533906;
constexpr double kSigmaBarXor = 0.8535533906;
constexpr double kHadamardTimesSigma = 1.4142135578;  // oracle flagged it inaccurate
constexpr double kSigmaXorSquared = 0.7285533903;     // same

SdpProgram one_by_one(double obj, double a, double b, Relation rel) {
  return {Matrix{{obj}}, {{Matrix{{a}}, b, rel}}, {}};
}

void expect_optimal(const SdpProgram& p, double value, double tol) {
  const SolveReport r = solve(p);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.solution.primal_value, value, tol);
  EXPECT_TRUE(meets_optimality_contract(p, r.solution, SolverConfig{}));
}

Graph petersen() {
  Graph g{10, {}};
  for (std::size_t i = 0; i < 5; ++i) {
    g.edges.emplace_back(i, (i + 1) % 5);
    g.edges.emplace_back(i, i + 5);
    g.edges.emplace_back(5 + i, 5 + (i + 2) % 5);
  }
  return g;
}

}  // namespace

TEST(Solve, TrivialOneByOne) { expect_optimal(one_by_one(1, 1, 1, Relation::kEq), 1.0, 1e-7); }

TEST(Solve, InequalityRowIsTight) {
  expect_optimal(one_by_one(2, 1, 3, Relation::kLe), 6.0, 1e-5);
}

TEST(Solve, ThetaCycleClosedForm) {
  for (std::size_t n : {5u, 7u, 9u}) {
    const double c = std::cos(M_PI / static_cast<double>(n));
    expect_optimal(theta_program(Graph::cycle(n)), n * c / (1 + c), 1e-5);
  }
}

TEST(Solve, ThetaOracleGraphs) {
  expect_optimal(theta_program(petersen()), kThetaPetersen, 1e-5);
  expect_optimal(theta_program(Graph{6, {{0, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 5}, {1, 4}}}),
                 kThetaG6, 1e-5);
  expect_optimal(theta_program(Graph::complete(4)), 1.0, 1e-5);
  expect_optimal(theta_program(Graph{4, {}}), 4.0, 1e-5);
}

TEST(Solve, Gamma2Inf) {
  expect_optimal(gamma2inf_program(SignMatrix{{1}}), 1.0, 1e-6);
  expect_optimal(gamma2inf_program(SignMatrix{{1, 1}, {1, -1}}), std::sqrt(2.0), 1e-6);
  expect_optimal(gamma2inf_program(SignMatrix{{1, 1, -1}, {1, -1, 1}}), kGammaMixed, 1e-6);
}

TEST(Solve, Counterexample) {
  expect_optimal(counterexample_program(), 0.0, 1e-6);
  const SdpProgram sq = product(counterexample_program(), counterexample_program());
  expect_optimal(sq, 1.0, 1e-5);
}

TEST(Solve, GameRelaxations) {
  const Game g = Game::xor_game();
  expect_optimal(fl_sigma_program(g), kSigmaXor, 1e-6);
  expect_optimal(fl_sigma_bar_prime_program(g), kSigmaBarXor, 1e-6);
}

// These products have no strictly feasible point; the solver has to find the
// face the feasible set lives on.
TEST(Solve, DegenerateProductNeedsFace) {
  const SdpProgram p =
      product(gamma2inf_program(SignMatrix{{1, 1}, {1, -1}}), fl_sigma_program(Game::xor_game()));
  expect_optimal(p, kHadamardTimesSigma, 1e-5);
}

TEST(Solve, DegenerateSelfProduct) {
  const SdpProgram s = fl_sigma_program(Game::xor_game());
  expect_optimal(product(s, s), kSigmaXorSquared, 1e-5);
}

TEST(Solve, Infeasible) {
  const SolveReport r = solve(one_by_one(1, 1, -1, Relation::kEq));
  EXPECT_EQ(r.status, SolveStatus::kInfeasible);
}

TEST(Solve, Unbounded) {
  // max X11 with only X00 pinned.
  SdpProgram p{Matrix{{0, 0}, {0, 1}}, {{Matrix{{1, 0}, {0, 0}}, 1.0, Relation::kEq}}, {}};
  EXPECT_EQ(solve(p).status, SolveStatus::kUnbounded);
}

TEST(Solve, IterationCapReported) {
  SolverConfig cfg;
  cfg.max_iters = 1;
  EXPECT_EQ(solve(theta_program(Graph::cycle(5)), cfg).status, SolveStatus::kMaxIters);
}

TEST(Solve, RejectsBadConfigAndProgram) {
  SolverConfig cfg;
  cfg.gap_tol = 0;
  EXPECT_FALSE(cfg.defects().empty());
  EXPECT_THROW(solve(counterexample_program(), cfg), std::invalid_argument);
  SdpProgram bad = counterexample_program();
  bad.objective(0, 1) = 5;
  EXPECT_THROW(solve(bad), std::invalid_argument);
}

TEST(Solve, Deterministic) {
  const SdpProgram p = gamma2inf_program(SignMatrix{{1, 1}, {1, -1}});
  const SolveReport a = solve(p), b = solve(p);
  EXPECT_EQ(a.solution.x, b.solution.x);
  EXPECT_EQ(a.solution.y, b.solution.y);
  EXPECT_EQ(a.solution.z, b.solution.z);
}

TEST(DualSlack, Signs) {
  const SdpProgram p = counterexample_program();
  const std::vector<double> y{2.0};
  const std::vector<double> z{1.0, 0.0};
  const SymMatrix minus = dual_slack(p, y, z, SlackSign::kMinus);
  const SymMatrix plus = dual_slack(p, y, z, SlackSign::kPlus);
  Matrix expect_minus = 2.0 * p.constraints[0].a;
  expect_minus -= p.nonneg[0];
  expect_minus -= p.objective;
  EXPECT_LT((minus.matrix() - expect_minus).max_abs(), 1e-15);
  Matrix expect_plus = 2.0 * p.constraints[0].a;
  expect_plus += p.nonneg[0];
  expect_plus += p.objective;
  EXPECT_LT((plus.matrix() - expect_plus).max_abs(), 1e-15);
}

TEST(EvaluateSolution, Residuals) {
  const SdpProgram p = one_by_one(1, 1, 1, Relation::kEq);
  const SdpSolution s = evaluate_solution(p, SymMatrix{{0.5}}, {1.0}, {});
  EXPECT_DOUBLE_EQ(s.primal_value, 0.5);
  EXPECT_DOUBLE_EQ(s.dual_value, 1.0);
  ASSERT_EQ(s.constraint_residuals.size(), 1u);
  EXPECT_DOUBLE_EQ(s.constraint_residuals[0], 0.5);
  EXPECT_FALSE(meets_optimality_contract(p, s, SolverConfig{}));
}

TEST(Nnls, KnownSolution) {
  // target = 2 e0 + 3 (e0 + e1); the negative direction gets nothing.
  const std::vector<std::vector<double>> cols{{1, 0}, {1, 1}, {-1, 0}};
  const std::vector<double> target{5, 3};
  const NnlsResult r = nnls(cols, target);
  ASSERT_EQ(r.coeffs.size(), 3u);
  EXPECT_NEAR(r.coeffs[0], 2.0, 1e-12);
  EXPECT_NEAR(r.coeffs[1], 3.0, 1e-12);
  EXPECT_EQ(r.coeffs[2], 0.0);
  EXPECT_NEAR(r.residual, 0.0, 1e-12);
}

TEST(Nnls, ProjectsOutsideCone) {
  const std::vector<std::vector<double>> cols{{1, 0}};
  const std::vector<double> target{-1, 2};
  const NnlsResult r = nnls(cols, target);
  EXPECT_EQ(r.coeffs[0], 0.0);
  EXPECT_NEAR(r.residual, std::sqrt(5.0), 1e-12);
}

TEST(Nnls, OrthonormalDifference) {
  const std::vector<std::vector<double>> cols{{1, 0, 0}, {0, 1, 0}};
  const std::vector<double> target{1, -1, 0};
  const NnlsResult r = nnls(cols, target);
  EXPECT_NEAR(r.coeffs[0], 1.0, 1e-12);
  EXPECT_EQ(r.coeffs[1], 0.0);
  EXPECT_NEAR(r.residual, 1.0, 1e-12);
}

TEST(Solve, ObjectiveScaling) {
  SdpProgram p = gamma2inf_program(SignMatrix{{1, 1, -1}, {1, -1, 1}});
  const double base = solve(p).solution.primal_value;
  p.objective *= 3.0;
  const SolveReport r = solve(p);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.solution.primal_value, 3.0 * base, 3e-6);
}

TEST(Solve, ProductOrderDoesNotMatter) {
  const SdpProgram a = gamma2inf_program(SignMatrix{{1, 1}, {1, -1}});
  const SdpProgram b = theta_program(Graph::cycle(5));
  const SolveReport ab = solve(product(a, b)), ba = solve(product(b, a));
  ASSERT_EQ(ab.status, SolveStatus::kOptimal);
  ASSERT_EQ(ba.status, SolveStatus::kOptimal);
  EXPECT_NEAR(ab.solution.primal_value, ba.solution.primal_value, 2e-6);
}

TEST(Solve, WeakDualityAndDualSigns) {
  const SolverConfig cfg;
  for (const SdpProgram& p : {fl_sigma_bar_prime_program(Game::xor_game()),
                              gamma2inf_program(SignMatrix{{1, 1}, {1, -1}}),
                              counterexample_program()}) {
    const SolveReport r = solve(p, cfg);
    ASSERT_EQ(r.status, SolveStatus::kOptimal);
    EXPECT_GE(r.solution.dual_value, r.solution.primal_value - cfg.gap_tol);
    for (double z : r.solution.z) EXPECT_GE(z, 0.0);
    for (std::size_t k = 0; k < p.num_constraints(); ++k)
      if (p.constraints[k].rel == Relation::kLe) EXPECT_GE(r.solution.y[k], -1e-9);
  }
}

TEST(DualSlack, SpecialCases) {
  const SdpProgram p = one_by_one(1, 1, 1, Relation::kEq);
  EXPECT_EQ(dual_slack(p, std::vector<double>{0.0}, {}, SlackSign::kMinus), SymMatrix{{-1}});
  EXPECT_EQ(dual_slack(p, std::vector<double>{1.0}, {}, SlackSign::kMinus), SymMatrix{{0}});
  EXPECT_THROW(dual_slack(p, std::vector<double>{}, {}, SlackSign::kMinus), std::invalid_argument);
}
