#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "prodsdp/model.hpp"
#include "prodsdp/solver.hpp"

namespace prodsdp {

// Entries at or below this magnitude count as structural zeros.
inline constexpr double kSupportThreshold = 1e-12;
inline constexpr double kDefaultSpanTol = 1e-8;

enum class Side { kLeft, kRight };

struct BipartitePartition {
  std::vector<Side> side;

  std::vector<std::size_t> left() const;
  std::vector<std::size_t> right() const;
  friend bool operator==(const BipartitePartition&, const BipartitePartition&) = default;
};

// A_k supported on the diagonal blocks, J and every B_k on the off-diagonal
// blocks.  Solved as a parity union-find over the indices; component roots go
// Left.  Returns nullopt when the parity constraints conflict.
std::optional<BipartitePartition> find_partition(const SdpProgram& p);

// Direct support scan of every matrix against the partition.
bool respects_partition(const SdpProgram& p, const BipartitePartition& part);

struct SpanWitness {
  std::vector<double> u;  // one per nonneg row
  double residual = 0.0;  // || sum u_k B_k - J ||_F
};

// u >= 0 with J = sum u_k B_k, accepted when the residual is at most
// tol * (1 + ||J||_F).  Identical B rows share their coefficient equally.
std::optional<SpanWitness> span_witness(const SdpProgram& p, double tol = kDefaultSpanTol);

enum class TheoremRule { kMs1, kMs2, kMain, kNone };

const char* to_string(TheoremRule rule);

struct ConditionReport {
  bool cond1_psd_objective = false;
  std::optional<BipartitePartition> bipartite;
  std::optional<SpanWitness> span_witness;
  TheoremRule theorem_applies = TheoremRule::kNone;
};

// Strongest rule first: MS-1 (affine, J psd), MS-2 (affine, bipartite), then
// Main (bipartite plus a span witness).  The two MS rules need every row to
// be an equality and no nonneg rows.
ConditionReport check_conditions(const SdpProgram& p);

// Relative tolerance on |alpha(p1 x p2) - alpha(p1) alpha(p2)|.
inline constexpr double kPerfectProductTol = 5e-5;
// Slack on the eigenvalues and entries of the product dual candidate,
// relative to the size of the data it is built from.
inline constexpr double kCandidateFeasTol = 1e-6;

struct ProductDualCandidate {
  std::vector<double> y;
  std::vector<double> v;
  double value = 0.0;           // y^T b of the product
  double min_slack_eig = 0.0;   // lambda_min(y^T A - (v^T B + J))
  double min_v = 0.0;
  double min_le_y = 0.0;        // smallest y on an LE row, 0 if there is none
  bool feasible = false;
};

struct ProductVerdict {
  SolveStatus status1 = SolveStatus::kMaxIters;
  SolveStatus status2 = SolveStatus::kMaxIters;
  SolveStatus status12 = SolveStatus::kMaxIters;
  double alpha1 = 0.0, alpha2 = 0.0, alpha12 = 0.0;
  double gap = 0.0;
  bool perfect = false;  // every solve optimal and gap within tolerance
  // Present when both factors have a partition and a span witness.
  std::optional<ProductDualCandidate> candidate;
};

ProductVerdict verify_perfect_product(const SdpProgram& p1, const SdpProgram& p2,
                                      const SolverConfig& cfg = {});

// Builds and checks (y1 (x) y2, z1 (x) z2 + z1 (x) u2 + u1 (x) z2) against the
// product program.
ProductDualCandidate product_dual_candidate(const SdpProgram& prod, const SdpSolution& s1,
                                            const SdpSolution& s2, std::span<const double> u1,
                                            std::span<const double> u2);

}  // namespace prodsdp
