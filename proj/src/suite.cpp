#include "prodsdp/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

#include "prodsdp/library.hpp"
#include "prodsdp/structure.hpp"

namespace prodsdp {

double theta_odd_cycle(int n) {
  const double c = std::cos(std::numbers::pi / n);
  return n * c / (1.0 + c);
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

class Rows {
 public:
  explicit Rows(int criterion) : criterion_(criterion) {}

  void abs(std::string check, double measured, double expected, double tol) {
    add(std::move(check), measured, expected, tol, Compare::kAbs,
        std::abs(measured - expected) <= tol);
  }
  void at_least(std::string check, double measured, double bound, double tol) {
    add(std::move(check), measured, bound, tol, Compare::kAtLeast, measured >= bound - tol);
  }
  void at_most(std::string check, double measured, double bound, double tol) {
    add(std::move(check), measured, bound, tol, Compare::kAtMost, measured <= bound + tol);
  }
  void flag(std::string check, bool measured, bool expected) {
    abs(std::move(check), measured ? 1.0 : 0.0, expected ? 1.0 : 0.0, 0.0);
  }

  std::vector<SuiteRow> take() { return std::move(rows_); }

 private:
  void add(std::string check, double m, double e, double tol, Compare c, bool pass) {
    rows_.push_back({criterion_, std::move(check), m, e, tol, c, pass && std::isfinite(m)});
  }
  int criterion_;
  std::vector<SuiteRow> rows_;
};

// Primal value of an Optimal solve, NaN otherwise so that every comparison
// against it fails.
double value(const SolveReport& r) {
  return r.status == SolveStatus::kOptimal ? r.solution.primal_value : kNan;
}

SdpProgram trivial_program() {
  return {Matrix{{1}}, {{Matrix{{1}}, 1.0, Relation::kEq}}, {}};
}

const SignMatrix& hadamard() {
  static const SignMatrix h{{1, 1}, {1, -1}};
  return h;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return kNan;
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double primal_violation(const SdpProgram& p, const SymMatrix& x) {
  const SdpSolution s = evaluate_solution(p, x, std::vector<double>(p.num_constraints(), 0.0),
                                          std::vector<double>(p.num_nonneg(), 0.0));
  double worst = s.psd_residual;
  for (double r : s.constraint_residuals) worst = std::max(worst, r);
  for (double r : s.nonneg_residuals) worst = std::max(worst, r);
  return worst;
}

std::vector<SuiteRow> counterexample_rows(const SolverConfig& cfg) {
  Rows out(1);
  const SdpProgram p = counterexample_program();
  const double a = value(solve(p, cfg));
  const double a2 = value(solve(product(p, p), cfg));
  out.abs("counterexample value", a, 0.0, 1e-6);
  out.at_least("counterexample x counterexample value", a2, 0.1, 0.0);
  out.abs("counterexample x counterexample vs oracle", a2, kCounterexampleSquaredValue, 1e-4);
  return out.take();
}

std::vector<SuiteRow> gamma_rows(const SolverConfig& cfg) {
  Rows out(2);
  const std::pair<const char*, SignMatrix> ones[] = {{"[1]", SignMatrix{{1}}},
                                                     {"[-1]", SignMatrix{{-1}}}};
  auto gap_row = [&](const std::string& name, const SdpProgram& p1, const SdpProgram& p2) {
    const ProductVerdict v = verify_perfect_product(p1, p2, cfg);
    const double expect = v.alpha1 * v.alpha2;
    const double gap = v.status1 == SolveStatus::kOptimal && v.status2 == SolveStatus::kOptimal &&
                               v.status12 == SolveStatus::kOptimal
                           ? v.gap
                           : kNan;
    out.abs("gamma2inf " + name + " product gap", gap, 0.0,
            kPerfectProductTol * (1.0 + std::abs(expect)));
  };
  for (const auto& [n1, m1] : ones)
    for (const auto& [n2, m2] : ones)
      gap_row(std::string(n1) + " x " + n2, gamma2inf_program(m1), gamma2inf_program(m2));
  const SdpProgram h = gamma2inf_program(hadamard());
  gap_row("[[1,1],[1,-1]] squared", h, h);
  return out.take();
}

std::vector<SuiteRow> theta_rows(const SolverConfig& cfg) {
  Rows out(3);
  const SdpProgram c5 = theta_program(Graph::cycle(5));
  const double t = value(solve(c5, cfg));
  const double t2 = value(solve(product(c5, c5), cfg));
  out.abs("theta(C5) vs closed form", t, theta_odd_cycle(5), 1e-4);
  out.abs("theta(C5 x C5) vs 5", t2, 5.0, 1e-3);
  out.abs("theta(C5 x C5) - theta(C5)^2", t2 - t * t, 0.0, kPerfectProductTol * (1.0 + t * t));
  return out.take();
}

std::vector<SuiteRow> checker_rows() {
  Rows out(4);
  const Game g = Game::xor_game();

  const SdpProgram gam = gamma2inf_program(hadamard());
  const ConditionReport rg = check_conditions(gam);
  out.flag("gamma2inf rule is Main", rg.theorem_applies == TheoremRule::kMain, true);
  const std::vector<double> all_ones(gam.num_nonneg(), 1.0);
  out.abs("gamma2inf witness max |u - 1|",
          rg.span_witness ? max_abs_diff(rg.span_witness->u, all_ones) : kNan, 0.0, 1e-8);
  out.at_most("gamma2inf witness residual", rg.span_witness ? rg.span_witness->residual : kNan,
              0.0, 1e-8);

  const SdpProgram bar = fl_sigma_bar_prime_program(g);
  const ConditionReport rb = check_conditions(bar);
  out.flag("sigma-bar' rule is Main", rb.theorem_applies == TheoremRule::kMain, true);
  const Matrix c = game_objective(g);
  const std::vector<double> vec_c(c.entries().begin(), c.entries().end());
  out.abs("sigma-bar' witness max |u - entries of C|",
          rb.span_witness ? max_abs_diff(rb.span_witness->u, vec_c) : kNan, 0.0, 1e-8);

  const ConditionReport rs = check_conditions(fl_sigma_program(g));
  out.flag("sigma rule is None", rs.theorem_applies == TheoremRule::kNone, true);

  const ConditionReport rc = check_conditions(counterexample_program());
  out.flag("counterexample bipartite", rc.bipartite.has_value(), true);
  out.flag("counterexample span witness", rc.span_witness.has_value(), false);
  out.flag("counterexample rule is None", rc.theorem_applies == TheoremRule::kNone, true);
  return out.take();
}

std::vector<SuiteRow> dual_rows(const SolverConfig& cfg) {
  Rows out(5);
  const Game g = Game::xor_game();
  const SdpProgram h = gamma2inf_program(hadamard());
  const SdpProgram ce = counterexample_program();
  const std::pair<std::string, SdpProgram> bipartite[] = {
      {"gamma2inf [1]", gamma2inf_program(SignMatrix{{1}})},
      {"gamma2inf [-1]", gamma2inf_program(SignMatrix{{-1}})},
      {"gamma2inf [[1,1],[1,-1]]", h},
      {"gamma2inf [[1,1],[1,-1]] squared", product(h, h)},
      {"counterexample", ce},
      {"counterexample squared", product(ce, ce)},
      {"sigma-bar'", fl_sigma_bar_prime_program(g)},
  };
  for (const auto& [name, p] : bipartite) {
    const SolveReport r = solve(p, cfg);
    double plus = kNan, minus = kNan;
    if (r.status == SolveStatus::kOptimal && find_partition(p)) {
      const auto& s = r.solution;
      minus = min_eigenvalue(dual_slack(p, s.y, s.z, SlackSign::kMinus));
      plus = min_eigenvalue(dual_slack(p, s.y, s.z, SlackSign::kPlus));
    }
    out.at_least("sign flip " + name + " lambda_min(plus slack)", plus, std::min(0.0, minus),
                 1e-7);
  }

  const std::pair<std::string, SdpProgram> factors[] = {
      {"gamma2inf [1]", gamma2inf_program(SignMatrix{{1}})},
      {"gamma2inf [[1,1],[1,-1]]", h},
      {"sigma-bar'", fl_sigma_bar_prime_program(g)},
  };
  for (const auto& [name, p] : factors) {
    const SolveReport r = solve(p, cfg);
    const ConditionReport c = check_conditions(p);
    double feasible = kNan, gap = kNan;
    if (r.status == SolveStatus::kOptimal && c.span_witness) {
      const auto& u = c.span_witness->u;
      const ProductDualCandidate d = product_dual_candidate(product(p, p), r.solution,
                                                            r.solution, u, u);
      feasible = d.feasible ? 1.0 : 0.0;
      const double a = r.solution.primal_value;
      gap = d.value - a * a;
    }
    out.abs("product dual " + name + " feasible", feasible, 1.0, 0.0);
    out.abs("product dual " + name + " value - alpha^2", gap, 0.0, 1e-4);
  }
  return out.take();
}

std::vector<SuiteRow> supermult_rows(const SolverConfig& cfg) {
  Rows out(6);
  const std::vector<SdpProgram> corpus = {
      trivial_program(),
      counterexample_program(),
      theta_program(Graph::cycle(5)),
      theta_program(Graph::complete(3)),
      gamma2inf_program(SignMatrix{{1}}),
      gamma2inf_program(SignMatrix{{-1}}),
      gamma2inf_program(hadamard()),
      fl_sigma_program(Game::xor_game()),
  };
  std::vector<SolveReport> single;
  for (const auto& p : corpus) single.push_back(solve(p, cfg));

  double margin = std::numeric_limits<double>::infinity();
  double violation = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t j = i; j < corpus.size(); ++j) {
      const SdpProgram prod = product(corpus[i], corpus[j]);
      // An unbounded product has value +inf and satisfies the inequality.
      const SolveReport r12 = solve(prod, cfg);
      const double a12 = r12.status == SolveStatus::kUnbounded
                             ? std::numeric_limits<double>::infinity()
                             : value(r12);
      const double ai = value(single[i]), aj = value(single[j]);
      margin = std::min(margin, a12 - ai * aj);
      if (std::isnan(a12 - ai * aj)) margin = kNan;
      const SymMatrix x(kron(single[i].solution.x, single[j].solution.x));
      violation = std::max(violation, primal_violation(prod, x));
      ++pairs;
    }
  const std::string count = std::to_string(pairs);
  out.at_least("min over " + count + " pairs of alpha(p1 x p2) - alpha(p1) alpha(p2)", margin,
               0.0, 1e-4);
  out.at_most("max over " + count + " pairs of X1 (x) X2 violation", violation, 0.0, 1e-7);
  return out.take();
}

std::vector<SuiteRow> game_rows(const SolverConfig& cfg) {
  Rows out(7);
  const Game g = Game::xor_game();
  const double omega = game_value(g);
  const double sigma = value(solve(fl_sigma_program(g), cfg));
  const SdpProgram bar = fl_sigma_bar_prime_program(g);
  const double sbar = value(solve(bar, cfg));
  const double sbar2 = value(solve(product(bar, bar), cfg));
  out.abs("omega(XOR)", omega, 0.75, 0.0);
  out.at_least("omega(XOR x XOR) >= omega(XOR)^2", game_value(game_product(g, g)), omega * omega,
               0.0);
  out.at_most("omega <= sigma", omega, sigma, 1e-6);
  out.at_most("sigma <= sigma-bar'", sigma, sbar, 1e-6);
  out.abs("sigma-bar'(G x G) - sigma-bar'(G)^2", sbar2 - sbar * sbar, 0.0, 5e-5);
  return out.take();
}

std::vector<SuiteRow> sandwich_rows(const SolverConfig& cfg) {
  Rows out(8);
  // Raw engine output only; distribution objects are not portable.
  std::mt19937 rng(20240611u);
  constexpr int kGraphs = 100;
  double margin = std::numeric_limits<double>::infinity();
  int optimal = 0;
  for (int k = 0; k < kGraphs; ++k) {
    Graph gr;
    gr.n = 1 + rng() % 6;
    for (std::size_t i = 0; i < gr.n; ++i)
      for (std::size_t j = i + 1; j < gr.n; ++j)
        if (rng() & 1u) gr.edges.emplace_back(i, j);
    const SolveReport r = solve(theta_program(gr), cfg);
    if (r.status == SolveStatus::kOptimal) ++optimal;
    margin = std::min(margin, value(r) - static_cast<double>(independence_number(gr)));
    if (std::isnan(value(r))) margin = kNan;
  }
  out.abs("random graphs solved to optimality", optimal, kGraphs, 0.0);
  out.at_least("min over graphs of theta - independence number", margin, 0.0, 1e-6);
  return out.take();
}

std::vector<SuiteRow> determinism_rows(const SolverConfig& cfg) {
  Rows out(9);
  const SdpProgram p = fl_sigma_bar_prime_program(Game::xor_game());
  const SolveReport a = solve(p, cfg);
  const SolveReport b = solve(p, cfg);
  const bool same = a.status == b.status && a.iterations == b.iterations &&
                    a.solution.x.matrix() == b.solution.x.matrix() && a.solution.y == b.solution.y &&
                    a.solution.z == b.solution.z &&
                    a.solution.primal_value == b.solution.primal_value &&
                    a.solution.dual_value == b.solution.dual_value;
  out.flag("repeat solve bit-identical", same, true);
  return out.take();
}

const char* compare_name(Compare c) {
  switch (c) {
    case Compare::kAbs: return "abs";
    case Compare::kAtLeast: return ">=";
    case Compare::kAtMost: return "<=";
  }
  return "?";
}

}  // namespace

std::vector<SuiteRow> run_suite(const SuiteOptions& opts) {
  const SolverConfig& cfg = opts.solver;
  std::vector<std::function<std::vector<SuiteRow>()>> parts = {
      [&] { return counterexample_rows(cfg); }, [&] { return gamma_rows(cfg); },
      [&] { return theta_rows(cfg); },          [] { return checker_rows(); },
      [&] { return dual_rows(cfg); },           [&] { return supermult_rows(cfg); },
      [&] { return game_rows(cfg); },           [&] { return sandwich_rows(cfg); },
      [&] { return determinism_rows(cfg); },
  };
  std::vector<SuiteRow> rows;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    auto part = parts[k]();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    if (opts.on_timing) opts.on_timing(static_cast<int>(k) + 1, dt.count());
    rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  return rows;
}

std::string format_suite(const std::vector<SuiteRow>& rows) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-62s %17s %17s %4s %9s  %s\n", "crit", "check",
                "measured", "expected", "cmp", "tol", "result");
  out += line;
  int passed = 0;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-4d %-62s %17.10g %17.10g %4s %9.2e  %s\n", r.criterion,
                  r.check.c_str(), r.measured, r.expected, compare_name(r.compare), r.tolerance,
                  r.pass ? "PASS" : "FAIL");
    out += line;
    passed += r.pass;
  }
  std::snprintf(line, sizeof line, "%d of %zu checks passed\n", passed, rows.size());
  out += line;
  return out;
}

bool all_pass(const std::vector<SuiteRow>& rows) {
  return !rows.empty() &&
         std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.pass; });
}

}  // namespace prodsdp
