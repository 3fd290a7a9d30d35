#include "prodsdp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "prodsdp/io.hpp"
#include "prodsdp/library.hpp"
#include "prodsdp/structure.hpp"
#include "prodsdp/suite.hpp"

namespace prodsdp {

namespace {

// Input trouble the user can fix by pointing at another file.
struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

bool all_ones(const std::vector<double>& u) {
  return std::all_of(u.begin(), u.end(), [](double v) { return std::abs(v - 1.0) <= 1e-8; });
}

std::string index_set(const std::vector<std::size_t>& idx) {
  std::string s = "{";
  for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? ", " : "") + std::to_string(idx[k]);
  return s + "}";
}

template <class T>
T load(const std::string& path, T (*parse)(std::string_view)) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::runtime_error& e) {
    throw BadInput(e.what());
  }
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw BadInput(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw BadInput(path + ": " + e.what());
  }
}

SdpProgram load_program(const std::string& path) {
  SdpProgram p = load(path, &parse_program);
  if (const auto defects = validate(p); !defects.empty()) throw BadInput(path + ": " + defects.front());
  return p;
}

void save(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  write_text(path, text);
}

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--gap-tol", cfg.gap_tol, "relative duality gap")->capture_default_str();
  cmd->add_option("--feas-tol", cfg.feas_tol, "absolute feasibility tolerance")
      ->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_iters, "interior point iteration cap")
      ->capture_default_str();
}

int cmd_solve(const std::string& path, const SolverConfig& cfg, std::ostream& out) {
  const SdpProgram p = load_program(path);
  const SolveReport r = solve(p, cfg);
  const SdpSolution& s = r.solution;
  const double cres =
      s.constraint_residuals.empty()
          ? 0.0
          : *std::max_element(s.constraint_residuals.begin(), s.constraint_residuals.end());
  const double nres =
      s.nonneg_residuals.empty()
          ? 0.0
          : *std::max_element(s.nonneg_residuals.begin(), s.nonneg_residuals.end());
  out << "status " << to_string(r.status) << '\n'
      << "primal " << fixed6(s.primal_value) << '\n'
      << "dual " << fixed6(s.dual_value) << '\n'
      << "iterations " << r.iterations << '\n'
      << "constraint residual " << sci(cres) << '\n'
      << "nonneg residual " << sci(nres) << '\n'
      << "psd residual " << sci(s.psd_residual) << '\n'
      << "dual psd residual " << sci(s.dual_psd_residual) << '\n';
  return r.status == SolveStatus::kOptimal ? kExitOk : kExitNotOptimal;
}

int cmd_check(const std::string& path, std::ostream& out) {
  const SdpProgram p = load_program(path);
  const ConditionReport c = check_conditions(p);
  out << "objective psd: " << (c.cond1_psd_objective ? "yes" : "no") << '\n';
  out << "constraints: " << (p.nonneg.empty() && p.all_equality() ? "affine" : "not affine")
      << '\n';
  if (c.bipartite)
    out << "bipartite: yes, left " << index_set(c.bipartite->left()) << ", right "
        << index_set(c.bipartite->right()) << '\n';
  else
    out << "bipartite: no, the support pattern admits no two-sided split\n";

  if (c.span_witness) {
    const auto& u = c.span_witness->u;
    out << "span witness: u = ";
    if (all_ones(u)) {
      out << "all-ones";
    } else {
      out << '[';
      for (std::size_t k = 0; k < u.size(); ++k) out << (k ? ", " : "") << general(u[k]);
      out << ']';
    }
    out << " (residual " << sci(c.span_witness->residual) << ")\n";
  } else if (p.nonneg.empty()) {
    out << "span witness: none, there are no nonneg rows\n";
  } else {
    out << "span witness: none, the objective is not a non-negative combination of the nonneg rows\n";
  }

  switch (c.theorem_applies) {
    case TheoremRule::kMs1: out << "MS-1 applies (J PSD)\n"; break;
    case TheoremRule::kMs2: out << "MS-2 applies (bipartite)\n"; break;
    case TheoremRule::kMain:
      out << "Main applies; u = " << (all_ones(c.span_witness->u) ? "all-ones" : "the witness above")
          << '\n';
      break;
    case TheoremRule::kNone: out << "None\n"; break;
  }
  return kExitOk;
}

int cmd_product(const std::string& a, const std::string& b, const std::string& dest,
                std::ostream& out) {
  const SdpProgram p = product(load_program(a), load_program(b));
  save(dest, emit_program(p), out);
  return kExitOk;
}

int cmd_generate(const std::string& kind, const std::string& input, const std::string& dest,
                 std::ostream& out) {
  auto need_input = [&] {
    if (input.empty()) throw BadInput("generate " + kind + " needs an input file");
  };
  SdpProgram p;
  if (kind == "counterexample") {
    p = counterexample_program();
  } else if (kind == "theta") {
    need_input();
    p = theta_program(load(input, &parse_graph));
  } else if (kind == "gamma2inf") {
    need_input();
    p = gamma2inf_program(load(input, &parse_sign_matrix));
  } else if (kind == "fl-sigma") {
    need_input();
    p = fl_sigma_program(load(input, &parse_game));
  } else if (kind == "fl-sigma-bar") {
    need_input();
    p = fl_sigma_bar_prime_program(load(input, &parse_game));
  } else {
    throw BadInput("unknown kind '" + kind + "'");
  }
  save(dest, emit_program(p), out);
  return kExitOk;
}

int cmd_suite(const SolverConfig& cfg, std::ostream& out) {
  SuiteOptions opts;
  opts.solver = cfg;
  const auto rows = run_suite(opts);
  out << format_suite(rows);
  return all_pass(rows) ? kExitOk : kExitFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model, solve and multiply small semidefinite programs.", "prodsdp"};
  app.require_subcommand(1);

  SolverConfig cfg;
  std::string path, path2, dest, kind;
  std::function<int()> action;

  auto* solve_cmd = app.add_subcommand("solve", "solve a program file");
  solve_cmd->add_option("program", path, "program file")->required();
  add_solver_flags(solve_cmd, cfg);
  solve_cmd->callback([&] { action = [&] { return cmd_solve(path, cfg, out); }; });

  auto* check_cmd = app.add_subcommand("check", "report which product rule applies");
  check_cmd->add_option("program", path, "program file")->required();
  check_cmd->callback([&] { action = [&] { return cmd_check(path, out); }; });

  auto* prod_cmd = app.add_subcommand("product", "write the tensor product of two programs");
  prod_cmd->add_option("first", path, "program file")->required();
  prod_cmd->add_option("second", path2, "program file")->required();
  prod_cmd->add_option("-o,--output", dest, "output file, stdout when omitted");
  prod_cmd->callback([&] { action = [&] { return cmd_product(path, path2, dest, out); }; });

  auto* gen_cmd = app.add_subcommand("generate", "build a program from a graph, matrix or game");
  gen_cmd->add_option("kind", kind, "theta, gamma2inf, counterexample, fl-sigma or fl-sigma-bar")
      ->required()
      ->check(CLI::IsMember({"theta", "gamma2inf", "counterexample", "fl-sigma", "fl-sigma-bar"}));
  gen_cmd->add_option("input", path, "graph, sign matrix or game file");
  gen_cmd->add_option("-o,--output", dest, "output file, stdout when omitted");
  gen_cmd->callback([&] { action = [&] { return cmd_generate(kind, path, dest, out); }; });

  auto* suite_cmd = app.add_subcommand("suite", "run the built-in verification table");
  add_solver_flags(suite_cmd, cfg);
  suite_cmd->callback([&] { action = [&] { return cmd_suite(cfg, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailed;
  }

  if (const auto defects = cfg.defects(); !defects.empty()) {
    err << "error: " << defects.front() << '\n';
    return kExitFailed;
  }
  try {
    return action();
  } catch (const BadInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace prodsdp
