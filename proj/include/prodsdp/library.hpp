#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "prodsdp/linalg.hpp"
#include "prodsdp/model.hpp"

namespace prodsdp {

struct Graph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  static Graph cycle(std::size_t n);
  static Graph complete(std::size_t n);
  // Throws std::invalid_argument on self-loops or out-of-range endpoints.
  void check() const;
  friend bool operator==(const Graph&, const Graph&) = default;
};

// Entries exactly +1 or -1.
class SignMatrix {
 public:
  explicit SignMatrix(Matrix m);
  SignMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SignMatrix(Matrix(rows)) {}
  const Matrix& matrix() const { return m_; }
  std::size_t rows() const { return m_.rows(); }
  std::size_t cols() const { return m_.cols(); }

 private:
  Matrix m_;
};

// Two-prover one-round game: questions (s, t) ~ P, answers (u, w), accepted
// when V(s, t, u, w) == 1.
struct Game {
  std::size_t num_s = 0, num_t = 0, num_u = 0, num_w = 0;
  std::vector<double> prob;        // num_s * num_t, row-major over (s, t)
  std::vector<std::uint8_t> pred;  // num_s * num_t * num_u * num_w

  double p(std::size_t s, std::size_t t) const { return prob[s * num_t + t]; }
  std::uint8_t v(std::size_t s, std::size_t t, std::size_t u, std::size_t w) const {
    return pred[((s * num_t + t) * num_u + u) * num_w + w];
  }
  std::uint8_t& v(std::size_t s, std::size_t t, std::size_t u, std::size_t w) {
    return pred[((s * num_t + t) * num_u + u) * num_w + w];
  }

  static Game make(std::size_t ns, std::size_t nt, std::size_t nu, std::size_t nw);
  // Uniform questions over {0,1}^2, accept iff u xor w == s and t.
  static Game xor_game();
  // Throws std::invalid_argument unless P is a distribution and V is 0/1.
  void check() const;
  friend bool operator==(const Game&, const Game&) = default;
};

inline constexpr std::uint64_t kMaxStrategyPairs = 10'000'000;

// maximize  all-ones . X  s.t.  Tr X = 1,  X_ij = 0 on edges,  X psd.
SdpProgram theta_program(const Graph& g);

// Nonneg rows follow the ordered index ranges (row, col) and (col, row); each
// mask is symmetrized, so the two orientations of one pair carry the same
// matrix and the all-ones vector spans the objective.
SdpProgram gamma2inf_program(const SignMatrix& m);

// The two-dimensional program whose value is 0 while its square has value 1.
SdpProgram counterexample_program();

// Exact value by enumeration of Alice's deterministic strategies with Bob's
// best response.  Throws std::length_error above kMaxStrategyPairs.
double game_value(const Game& g);
Game game_product(const Game& g1, const Game& g2);

// Objective matrix C[(s,u),(t,w)] = P(s,t) V(s,t,u,w).
Matrix game_objective(const Game& g);
// Positions in the joint variable: Alice's (s, u) first, then Bob's (t, w).
std::size_t alice_index(const Game& g, std::size_t s, std::size_t u);
std::size_t bob_index(const Game& g, std::size_t t, std::size_t w);

// Quadratic-program relaxation with block-sum equalities over every unordered
// question pair and entrywise non-negativity.
SdpProgram fl_sigma_program(const Game& g);

inline constexpr std::size_t kMaxSignPatternAnswers = 2;

// Further relaxation: on-diagonal block sums in absolute value at most one,
// expanded over every sign pattern, plus non-negativity on the cross blocks.
SdpProgram fl_sigma_bar_prime_program(const Game& g);

// Brute-force over all 2^n vertex subsets.
std::size_t independence_number(const Graph& g);

}  // namespace prodsdp
