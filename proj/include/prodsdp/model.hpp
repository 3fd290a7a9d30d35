#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "prodsdp/linalg.hpp"

namespace prodsdp {

// A GE row is stored as a negated LE row.
enum class Relation { kEq, kLe };

const char* to_string(Relation rel);

struct LinearConstraint {
  Matrix a;
  double rhs = 0.0;
  Relation rel = Relation::kEq;

  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

// max J . X  s.t.  A_k . X (= or <=) b_k,  B_k . X >= 0,  X psd.
//
// Matrices are stored unsymmetrized so that validate() can reject asymmetric
// input; everything downstream of validate() may assume exact symmetry.
struct SdpProgram {
  Matrix objective;
  std::vector<LinearConstraint> constraints;
  std::vector<Matrix> nonneg;

  std::size_t dim() const { return objective.rows(); }
  std::size_t num_constraints() const { return constraints.size(); }
  std::size_t num_nonneg() const { return nonneg.size(); }
  bool all_equality() const;

  friend bool operator==(const SdpProgram&, const SdpProgram&) = default;
};

struct SdpSolution {
  SymMatrix x;
  std::vector<double> y;  // one per constraint, in program order
  std::vector<double> z;  // one per nonneg row
  double primal_value = 0.0;
  double dual_value = 0.0;
  // |A_k . X - b_k| for EQ rows, max(0, A_k . X - b_k) for LE rows.
  std::vector<double> constraint_residuals;
  // max(0, -B_k . X).
  std::vector<double> nonneg_residuals;
  // max(0, -lambda_min(X)) and max(0, -lambda_min(dual slack)).
  double psd_residual = 0.0;
  double dual_psd_residual = 0.0;
};

// Human-readable defects; empty iff the program is well formed.
std::vector<std::string> validate(const SdpProgram& p);
// Throws std::invalid_argument carrying the first defect.
void require_valid(const SdpProgram& p);

// (J1 (x) J2, A1 (x) A2, b1 (x) b2, B1 (x) B2).  Row (i, j) of the product
// lands at index i * m2 + j; its relation is EQ only when both factors are EQ.
SdpProgram product(const SdpProgram& p1, const SdpProgram& p2);

// Stable sort of the constraint list: EQ rows first, then LE rows.
SdpProgram canonicalize(SdpProgram p);

SymMatrix bipartite_tensor(const Matrix& a);

}  // namespace prodsdp
