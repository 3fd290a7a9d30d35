#include "prodsdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace prodsdp {

const char* to_string(Relation rel) { return rel == Relation::kEq ? "EQ" : "LE"; }

bool SdpProgram::all_equality() const {
  return std::all_of(constraints.begin(), constraints.end(),
                     [](const LinearConstraint& c) { return c.rel == Relation::kEq; });
}

namespace {

void check_matrix(const Matrix& m, std::size_t dim, const std::string& name,
                  std::vector<std::string>& defects) {
  if (m.rows() != dim || m.cols() != dim) {
    std::ostringstream os;
    os << name << ": dimension mismatch, expected " << dim << "x" << dim << ", got " << m.rows()
       << "x" << m.cols();
    defects.push_back(os.str());
    return;
  }
  if (!m.all_finite()) {
    defects.push_back(name + ": non-finite entry");
    return;
  }
  if (!m.is_symmetric()) defects.push_back(name + ": asymmetric matrix");
}

}  // namespace

std::vector<std::string> validate(const SdpProgram& p) {
  std::vector<std::string> defects;
  const std::size_t dim = p.objective.rows();
  if (dim == 0) defects.push_back("objective: empty matrix");
  check_matrix(p.objective, dim, "objective", defects);
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    const auto& c = p.constraints[k];
    check_matrix(c.a, dim, "constraint " + std::to_string(k), defects);
    if (!std::isfinite(c.rhs)) defects.push_back("constraint " + std::to_string(k) + ": non-finite rhs");
  }
  for (std::size_t k = 0; k < p.nonneg.size(); ++k)
    check_matrix(p.nonneg[k], dim, "nonneg " + std::to_string(k), defects);
  return defects;
}

void require_valid(const SdpProgram& p) {
  const auto defects = validate(p);
  if (!defects.empty()) throw std::invalid_argument("invalid program: " + defects.front());
}

SdpProgram product(const SdpProgram& p1, const SdpProgram& p2) {
  require_valid(p1);
  require_valid(p2);
  SdpProgram out;
  out.objective = kron(p1.objective, p2.objective);
  out.constraints.reserve(p1.constraints.size() * p2.constraints.size());
  for (const auto& c1 : p1.constraints) {
    for (const auto& c2 : p2.constraints) {
      const Relation rel =
          (c1.rel == Relation::kEq && c2.rel == Relation::kEq) ? Relation::kEq : Relation::kLe;
      out.constraints.push_back({kron(c1.a, c2.a), c1.rhs * c2.rhs, rel});
    }
  }
  out.nonneg.reserve(p1.nonneg.size() * p2.nonneg.size());
  for (const auto& b1 : p1.nonneg)
    for (const auto& b2 : p2.nonneg) out.nonneg.push_back(kron(b1, b2));
  return out;
}

SdpProgram canonicalize(SdpProgram p) {
  std::stable_sort(p.constraints.begin(), p.constraints.end(),
                   [](const LinearConstraint& a, const LinearConstraint& b) {
                     return a.rel == Relation::kEq && b.rel == Relation::kLe;
                   });
  return p;
}

SymMatrix bipartite_tensor(const Matrix& a) { return hat(kron(a, a)); }

}  // namespace prodsdp
