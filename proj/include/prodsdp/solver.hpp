#pragma once

#include <span>
#include <string>
#include <vector>

#include "prodsdp/linalg.hpp"
#include "prodsdp/model.hpp"

namespace prodsdp {

struct SolverConfig {
  double gap_tol = 1e-6;   // |primal - dual| <= gap_tol * (1 + |primal|)
  double feas_tol = 1e-7;  // absolute, per constraint and per eigenvalue
  int max_iters = 500;
  // Fraction of the distance to the cone boundary taken per step.
  double step_fraction = 0.98;
  // Divergence thresholds for the infeasible / unbounded heuristics.
  double divergence_bound = 1e12;

  // Empty iff every tolerance is positive.
  std::vector<std::string> defects() const;
};

enum class SolveStatus { kOptimal, kMaxIters, kInfeasible, kUnbounded };

const char* to_string(SolveStatus status);

struct SolveReport {
  SdpSolution solution;
  SolveStatus status = SolveStatus::kMaxIters;
  int iterations = 0;
};

// Primal-dual interior point method with Nesterov-Todd scaling.  The Newton
// system is assembled in the space of the primal matrix variable, so the cost
// is governed by dim(X) rather than by the number of inequality rows.
SolveReport solve(const SdpProgram& p, const SolverConfig& cfg = {});

enum class SlackSign { kMinus, kPlus };

// y^T A - (z^T B + J) for kMinus, y^T A + (z^T B + J) for kPlus.
SymMatrix dual_slack(const SdpProgram& p, std::span<const double> y, std::span<const double> z,
                     SlackSign sign);

// Fills values and residuals of (x, y, z) against p.
SdpSolution evaluate_solution(const SdpProgram& p, SymMatrix x, std::vector<double> y,
                              std::vector<double> z);

// True when every solve() postcondition for an Optimal report holds.
bool meets_optimality_contract(const SdpProgram& p, const SdpSolution& s,
                               const SolverConfig& cfg);

struct NnlsResult {
  std::vector<double> coeffs;
  double residual = 0.0;
};

// Lawson-Hanson active set: min ||sum_k c_k columns[k] - target||, c >= 0.
NnlsResult nnls(const std::vector<std::vector<double>>& columns, std::span<const double> target);

}  // namespace prodsdp
