#pragma once

#include <functional>
#include <string>
#include <vector>

#include "prodsdp/solver.hpp"

namespace prodsdp {

// Value of the self-product of the two-dimensional counterexample, fixed in
// advance by a grid search over the trace-one feasible set together with the
// largest-eigenvalue upper bound.
inline constexpr double kCounterexampleSquaredValue = 1.0;

// theta(C_n) = n cos(pi/n) / (1 + cos(pi/n)) for odd n.
double theta_odd_cycle(int n);

enum class Compare { kAbs, kAtLeast, kAtMost };

struct SuiteRow {
  int criterion = 0;
  std::string check;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Compare compare = Compare::kAbs;
  bool pass = false;
};

struct SuiteOptions {
  SolverConfig solver;
  // Called once per criterion with its wall time; never part of the report.
  std::function<void(int criterion, double seconds)> on_timing;
};

inline constexpr int kNumCriteria = 9;

std::vector<SuiteRow> run_suite(const SuiteOptions& opts = {});
std::string format_suite(const std::vector<SuiteRow>& rows);
bool all_pass(const std::vector<SuiteRow>& rows);

}  // namespace prodsdp
