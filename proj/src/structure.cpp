#include "prodsdp/structure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace prodsdp {

namespace {

bool nonzero(double v) { return std::abs(v) > kSupportThreshold; }

// Parity union-find; parity_[i] is the side of i relative to parent_[i].
class ParityForest {
 public:
  explicit ParityForest(std::size_t n) : parent_(n), parity_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::pair<std::size_t, int> find(std::size_t i) {
    if (parent_[i] == i) return {i, 0};
    auto [root, par] = find(parent_[i]);
    parity_[i] ^= par;
    parent_[i] = root;
    return {root, parity_[i]};
  }

  // rel 0: same side, 1: opposite sides.  False on a conflict.
  bool join(std::size_t i, std::size_t j, int rel) {
    auto [ri, pi] = find(i);
    auto [rj, pj] = find(j);
    if (ri == rj) return (pi ^ pj) == rel;
    if (rj < ri) std::swap(ri, rj);
    parent_[rj] = ri;  // smallest index stays the root
    parity_[rj] = pi ^ pj ^ rel;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> parity_;
};

std::vector<double> flatten(const Matrix& m) {
  return {m.entries().begin(), m.entries().end()};
}

}  // namespace

std::vector<std::size_t> BipartitePartition::left() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < side.size(); ++i)
    if (side[i] == Side::kLeft) out.push_back(i);
  return out;
}

std::vector<std::size_t> BipartitePartition::right() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < side.size(); ++i)
    if (side[i] == Side::kRight) out.push_back(i);
  return out;
}

std::optional<BipartitePartition> find_partition(const SdpProgram& p) {
  const std::size_t n = p.dim();
  ParityForest forest(n);

  auto cross = [&](const Matrix& m) {
    for (std::size_t i = 0; i < n; ++i) {
      if (nonzero(m(i, i))) return false;
      for (std::size_t j = i + 1; j < n; ++j)
        if (nonzero(m(i, j)) && !forest.join(i, j, 1)) return false;
    }
    return true;
  };
  auto within = [&](const Matrix& m) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (nonzero(m(i, j)) && !forest.join(i, j, 0)) return false;
    return true;
  };

  if (!cross(p.objective)) return std::nullopt;
  for (const auto& b : p.nonneg)
    if (!cross(b)) return std::nullopt;
  for (const auto& c : p.constraints)
    if (!within(c.a)) return std::nullopt;

  BipartitePartition part;
  part.side.resize(n);
  std::vector<std::size_t> root(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [r, par] = forest.find(i);
    root[i] = r;
    part.side[i] = par ? Side::kRight : Side::kLeft;
  }

  // Nothing forced a Right index: move the last component across if there is
  // more than one.
  if (n >= 2 && part.right().empty()) {
    const std::size_t last = root[n - 1];
    for (std::size_t i = 0; i < n; ++i)
      if (root[i] == last) part.side[i] = Side::kRight;
    if (part.left().empty()) return std::nullopt;
  }
  return part;
}

bool respects_partition(const SdpProgram& p, const BipartitePartition& part) {
  const std::size_t n = p.dim();
  if (part.side.size() != n) return false;
  auto scan = [&](const Matrix& m, bool want_cross) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const bool is_cross = part.side[i] != part.side[j];
        if (is_cross != want_cross && nonzero(m(i, j))) return false;
      }
    return true;
  };
  if (!scan(p.objective, true)) return false;
  for (const auto& b : p.nonneg)
    if (!scan(b, true)) return false;
  for (const auto& c : p.constraints)
    if (!scan(c.a, false)) return false;
  return true;
}

std::optional<SpanWitness> span_witness(const SdpProgram& p, double tol) {
  // Duplicate rows make the least-squares columns dependent; solve over the
  // distinct ones and split each coefficient across its copies.
  std::map<std::vector<double>, std::size_t> seen;
  std::vector<std::vector<double>> columns;
  std::vector<std::size_t> group(p.num_nonneg());
  for (std::size_t k = 0; k < p.num_nonneg(); ++k) {
    auto col = flatten(p.nonneg[k]);
    auto [it, fresh] = seen.try_emplace(col, columns.size());
    if (fresh) columns.push_back(std::move(col));
    group[k] = it->second;
  }
  std::vector<std::size_t> copies(columns.size(), 0);
  for (std::size_t g : group) ++copies[g];

  const auto target = flatten(p.objective);
  const NnlsResult fit = nnls(columns, target);

  SpanWitness w;
  w.u.resize(p.num_nonneg());
  Matrix recon(p.dim(), p.dim());
  for (std::size_t k = 0; k < p.num_nonneg(); ++k) {
    w.u[k] = fit.coeffs[group[k]] / static_cast<double>(copies[group[k]]);
    recon += w.u[k] * p.nonneg[k];
  }
  recon -= p.objective;
  w.residual = recon.frobenius_norm();
  if (w.residual > tol * (1.0 + p.objective.frobenius_norm())) return std::nullopt;
  return w;
}

const char* to_string(TheoremRule rule) {
  switch (rule) {
    case TheoremRule::kMs1: return "MS-1";
    case TheoremRule::kMs2: return "MS-2";
    case TheoremRule::kMain: return "Main";
    case TheoremRule::kNone: return "None";
  }
  return "?";
}

ConditionReport check_conditions(const SdpProgram& p) {
  require_valid(p);
  ConditionReport r;
  const SymMatrix j(p.objective);
  r.cond1_psd_objective = is_psd(j, kDefaultPsdTol * (1.0 + p.objective.max_abs()));
  r.bipartite = find_partition(p);
  r.span_witness = span_witness(p);

  const bool affine = p.nonneg.empty() && p.all_equality();
  if (affine && r.cond1_psd_objective)
    r.theorem_applies = TheoremRule::kMs1;
  else if (affine && r.bipartite)
    r.theorem_applies = TheoremRule::kMs2;
  else if (r.bipartite && r.span_witness)
    r.theorem_applies = TheoremRule::kMain;
  return r;
}

ProductDualCandidate product_dual_candidate(const SdpProgram& prod, const SdpSolution& s1,
                                            const SdpSolution& s2, std::span<const double> u1,
                                            std::span<const double> u2) {
  ProductDualCandidate c;
  c.y = kron(s1.y, s2.y);
  c.v = kron(s1.z, s2.z);
  const auto zu = kron(s1.z, u2);
  const auto uz = kron(u1, s2.z);
  for (std::size_t k = 0; k < c.v.size(); ++k) c.v[k] += zu[k] + uz[k];

  for (std::size_t k = 0; k < prod.num_constraints(); ++k) {
    c.value += c.y[k] * prod.constraints[k].rhs;
    if (prod.constraints[k].rel == Relation::kLe) c.min_le_y = std::min(c.min_le_y, c.y[k]);
  }
  c.min_v = c.v.empty() ? 0.0 : *std::min_element(c.v.begin(), c.v.end());
  const SymMatrix slack = dual_slack(prod, c.y, c.v, SlackSign::kMinus);
  c.min_slack_eig = min_eigenvalue(slack);

  const double scale = 1.0 + norm_inf(c.y) + norm_inf(c.v) + prod.objective.max_abs();
  const double tol = kCandidateFeasTol * scale;
  c.feasible = c.min_slack_eig >= -tol && c.min_v >= -tol && c.min_le_y >= -tol;
  return c;
}

ProductVerdict verify_perfect_product(const SdpProgram& p1, const SdpProgram& p2,
                                      const SolverConfig& cfg) {
  const SdpProgram prod = product(p1, p2);
  const SolveReport r1 = solve(p1, cfg);
  const SolveReport r2 = solve(p2, cfg);
  const SolveReport r12 = solve(prod, cfg);

  ProductVerdict v;
  v.status1 = r1.status;
  v.status2 = r2.status;
  v.status12 = r12.status;
  v.alpha1 = r1.solution.primal_value;
  v.alpha2 = r2.solution.primal_value;
  v.alpha12 = r12.solution.primal_value;
  const double expect = v.alpha1 * v.alpha2;
  v.gap = std::abs(v.alpha12 - expect);
  const bool optimal = r1.status == SolveStatus::kOptimal && r2.status == SolveStatus::kOptimal &&
                       r12.status == SolveStatus::kOptimal;
  v.perfect = optimal && v.gap <= kPerfectProductTol * (1.0 + std::abs(expect));

  if (r1.status == SolveStatus::kOptimal && r2.status == SolveStatus::kOptimal) {
    const auto c1 = check_conditions(p1);
    const auto c2 = check_conditions(p2);
    if (c1.bipartite && c1.span_witness && c2.bipartite && c2.span_witness)
      v.candidate = product_dual_candidate(prod, r1.solution, r2.solution, c1.span_witness->u,
                                           c2.span_witness->u);
  }
  return v;
}

}  // namespace prodsdp
