#include "prodsdp/library.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace prodsdp {

namespace {

// 1/2 (E_ij + E_ji): the symmetric matrix whose product with a symmetric X is X_ij.
Matrix sym_mask(std::size_t n, std::size_t i, std::size_t j, double weight = 1.0) {
  Matrix m(n, n);
  if (i == j) {
    m(i, i) = weight;
  } else {
    m(i, j) = 0.5 * weight;
    m(j, i) = 0.5 * weight;
  }
  return m;
}

Matrix all_ones(std::size_t n) { return Matrix(n, n, 1.0); }

// Saturating power, used for the strategy-space bound.
std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t k = 0; k < exp; ++k) {
    if (base != 0 && r > kMaxStrategyPairs * 10 / base) return kMaxStrategyPairs * 10;
    r *= base;
  }
  return r;
}

}  // namespace

Graph Graph::cycle(std::size_t n) {
  Graph g{n, {}};
  for (std::size_t i = 0; i < n; ++i) g.edges.emplace_back(std::min(i, (i + 1) % n), std::max(i, (i + 1) % n));
  return g;
}

Graph Graph::complete(std::size_t n) {
  Graph g{n, {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
  return g;
}

void Graph::check() const {
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) throw std::invalid_argument("graph: edge endpoint out of range");
    if (i == j) throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(i));
  }
}

SignMatrix::SignMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw std::invalid_argument("sign matrix: empty");
  for (double v : m_.entries())
    if (v != 1.0 && v != -1.0) throw std::invalid_argument("sign matrix: entries must be +1 or -1");
}

Game Game::make(std::size_t ns, std::size_t nt, std::size_t nu, std::size_t nw) {
  Game g;
  g.num_s = ns;
  g.num_t = nt;
  g.num_u = nu;
  g.num_w = nw;
  g.prob.assign(ns * nt, 0.0);
  g.pred.assign(ns * nt * nu * nw, 0);
  return g;
}

Game Game::xor_game() {
  Game g = make(2, 2, 2, 2);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t) {
      g.prob[s * 2 + t] = 0.25;
      for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t w = 0; w < 2; ++w) g.v(s, t, u, w) = ((u ^ w) == (s & t)) ? 1 : 0;
    }
  return g;
}

void Game::check() const {
  if (num_s == 0 || num_t == 0 || num_u == 0 || num_w == 0)
    throw std::invalid_argument("game: empty question or answer set");
  if (prob.size() != num_s * num_t || pred.size() != num_s * num_t * num_u * num_w)
    throw std::invalid_argument("game: table sizes do not match the alphabets");
  double total = 0.0;
  for (double q : prob) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument("game: negative probability");
    total += q;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("game: probabilities do not sum to 1");
  for (auto b : pred)
    if (b > 1) throw std::invalid_argument("game: predicate entries must be 0 or 1");
}

SdpProgram theta_program(const Graph& g) {
  g.check();
  SdpProgram p;
  p.objective = all_ones(g.n);
  p.constraints.push_back({Matrix::identity(g.n), 1.0, Relation::kEq});
  for (const auto& [i, j] : g.edges) p.constraints.push_back({sym_mask(g.n, i, j), 0.0, Relation::kEq});
  return p;
}

SdpProgram gamma2inf_program(const SignMatrix& sm) {
  const Matrix& m = sm.matrix();
  const std::size_t r = m.rows();
  const std::size_t c = m.cols();
  const std::size_t n = r + c;
  SdpProgram p;
  p.objective = hat(m).matrix();
  p.constraints.push_back({Matrix::identity(n), 1.0, Relation::kEq});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) p.constraints.push_back({sym_mask(n, i, j), 0.0, Relation::kEq});
  for (std::size_t i = r; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) p.constraints.push_back({sym_mask(n, i, j), 0.0, Relation::kEq});
  // X . (Mhat o E_ij) >= 0 for (row, col) then (col, row).  Each orientation
  // is M_ij/2 (E_ij + E_ji); the two orientations of a pair sum to its entries
  // of Mhat.
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) p.nonneg.push_back(sym_mask(n, i, r + j, m(i, j)));
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t i = 0; i < r; ++i) p.nonneg.push_back(sym_mask(n, r + j, i, m(i, j)));
  return p;
}

SdpProgram counterexample_program() {
  SdpProgram p;
  p.objective = Matrix{{0.0, -1.0}, {-1.0, 0.0}};
  p.constraints.push_back({Matrix::identity(2), 1.0, Relation::kEq});
  p.nonneg.push_back(sym_mask(2, 0, 1));
  p.nonneg.push_back(sym_mask(2, 1, 0));
  return p;
}

double game_value(const Game& g) {
  g.check();
  const std::uint64_t alice = checked_pow(g.num_u, g.num_s);
  const std::uint64_t bob = checked_pow(g.num_w, g.num_t);
  if (alice > kMaxStrategyPairs || bob > kMaxStrategyPairs || alice * bob > kMaxStrategyPairs)
    throw std::length_error("game_value: strategy space exceeds the brute-force bound");

  std::vector<std::size_t> a(g.num_s, 0);
  double best = 0.0;
  for (std::uint64_t code = 0; code < alice; ++code) {
    std::uint64_t rest = code;
    for (std::size_t s = 0; s < g.num_s; ++s) {
      a[s] = rest % g.num_u;
      rest /= g.num_u;
    }
    // Bob's questions decouple once Alice is fixed.
    double value = 0.0;
    for (std::size_t t = 0; t < g.num_t; ++t) {
      double best_t = 0.0;
      for (std::size_t w = 0; w < g.num_w; ++w) {
        double acc = 0.0;
        for (std::size_t s = 0; s < g.num_s; ++s)
          if (g.v(s, t, a[s], w)) acc += g.p(s, t);
        best_t = std::max(best_t, acc);
      }
      value += best_t;
    }
    best = std::max(best, value);
  }
  return best;
}

Game game_product(const Game& g1, const Game& g2) {
  g1.check();
  g2.check();
  Game g = Game::make(g1.num_s * g2.num_s, g1.num_t * g2.num_t, g1.num_u * g2.num_u,
                      g1.num_w * g2.num_w);
  for (std::size_t s1 = 0; s1 < g1.num_s; ++s1)
    for (std::size_t s2 = 0; s2 < g2.num_s; ++s2)
      for (std::size_t t1 = 0; t1 < g1.num_t; ++t1)
        for (std::size_t t2 = 0; t2 < g2.num_t; ++t2) {
          const std::size_t s = s1 * g2.num_s + s2;
          const std::size_t t = t1 * g2.num_t + t2;
          g.prob[s * g.num_t + t] = g1.p(s1, t1) * g2.p(s2, t2);
          for (std::size_t u1 = 0; u1 < g1.num_u; ++u1)
            for (std::size_t u2 = 0; u2 < g2.num_u; ++u2)
              for (std::size_t w1 = 0; w1 < g1.num_w; ++w1)
                for (std::size_t w2 = 0; w2 < g2.num_w; ++w2)
                  g.v(s, t, u1 * g2.num_u + u2, w1 * g2.num_w + w2) =
                      g1.v(s1, t1, u1, w1) & g2.v(s2, t2, u2, w2);
        }
  return g;
}

std::size_t alice_index(const Game& g, std::size_t s, std::size_t u) { return s * g.num_u + u; }

std::size_t bob_index(const Game& g, std::size_t t, std::size_t w) {
  return g.num_s * g.num_u + t * g.num_w + w;
}

Matrix game_objective(const Game& g) {
  Matrix c(g.num_s * g.num_u, g.num_t * g.num_w);
  for (std::size_t s = 0; s < g.num_s; ++s)
    for (std::size_t u = 0; u < g.num_u; ++u)
      for (std::size_t t = 0; t < g.num_t; ++t)
        for (std::size_t w = 0; w < g.num_w; ++w)
          c(s * g.num_u + u, t * g.num_w + w) = g.v(s, t, u, w) ? g.p(s, t) : 0.0;
  return c;
}

SdpProgram fl_sigma_program(const Game& g) {
  g.check();
  const std::size_t n = g.num_s * g.num_u + g.num_t * g.num_w;
  SdpProgram p;
  p.objective = 0.5 * hat(game_objective(g)).matrix();

  // Question q in S u T owns a contiguous block of answer indices.
  struct Block {
    std::size_t first, size;
  };
  std::vector<Block> blocks;
  for (std::size_t s = 0; s < g.num_s; ++s) blocks.push_back({alice_index(g, s, 0), g.num_u});
  for (std::size_t t = 0; t < g.num_t; ++t) blocks.push_back({bob_index(g, t, 0), g.num_w});
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    for (std::size_t b = a; b < blocks.size(); ++b) {
      Matrix m(n, n);
      for (std::size_t i = 0; i < blocks[a].size; ++i)
        for (std::size_t j = 0; j < blocks[b].size; ++j) {
          const std::size_t r = blocks[a].first + i;
          const std::size_t c = blocks[b].first + j;
          if (a == b) {
            m(r, c) = 1.0;
          } else {
            m(r, c) = 0.5;
            m(c, r) = 0.5;
          }
        }
      p.constraints.push_back({std::move(m), 1.0, Relation::kEq});
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) p.nonneg.push_back(sym_mask(n, i, j));
  return p;
}

SdpProgram fl_sigma_bar_prime_program(const Game& g) {
  g.check();
  if (g.num_u > kMaxSignPatternAnswers || g.num_w > kMaxSignPatternAnswers)
    throw std::length_error("fl_sigma_bar_prime_program: answer sets too large to expand sign patterns");
  const std::size_t n = g.num_s * g.num_u + g.num_t * g.num_w;
  SdpProgram p;
  p.objective = 0.5 * hat(game_objective(g)).matrix();

  auto add_side = [&](std::size_t questions, std::size_t answers, std::size_t offset) {
    const std::size_t cells = answers * answers;
    for (std::size_t q1 = 0; q1 < questions; ++q1) {
      for (std::size_t q2 = q1; q2 < questions; ++q2) {
        for (std::size_t pattern = 0; pattern < (std::size_t{1} << cells); ++pattern) {
          Matrix m(n, n);
          for (std::size_t a = 0; a < answers; ++a)
            for (std::size_t b = 0; b < answers; ++b) {
              const double sign = (pattern >> (a * answers + b)) & 1 ? -1.0 : 1.0;
              const std::size_t r = offset + q1 * answers + a;
              const std::size_t c = offset + q2 * answers + b;
              m(r, c) += 0.5 * sign;
              m(c, r) += 0.5 * sign;
            }
          p.constraints.push_back({std::move(m), 1.0, Relation::kLe});
        }
      }
    }
  };
  add_side(g.num_s, g.num_u, alice_index(g, 0, 0));
  add_side(g.num_t, g.num_w, bob_index(g, 0, 0));

  for (std::size_t s = 0; s < g.num_s; ++s)
    for (std::size_t u = 0; u < g.num_u; ++u)
      for (std::size_t t = 0; t < g.num_t; ++t)
        for (std::size_t w = 0; w < g.num_w; ++w)
          p.nonneg.push_back(sym_mask(n, alice_index(g, s, u), bob_index(g, t, w)));
  return p;
}

std::size_t independence_number(const Graph& g) {
  g.check();
  if (g.n > 30) throw std::length_error("independence_number: graph too large for subset scan");
  std::vector<std::uint32_t> adj(g.n, 0);
  for (const auto& [i, j] : g.edges) {
    adj[i] |= 1u << j;
    adj[j] |= 1u << i;
  }
  std::size_t best = 0;
  const std::uint32_t limit = g.n == 0 ? 1u : (1u << g.n);
  for (std::uint32_t set = 0; set < limit; ++set) {
    bool independent = true;
    for (std::size_t v = 0; v < g.n && independent; ++v)
      if ((set >> v & 1u) && (adj[v] & set)) independent = false;
    if (independent) best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(set)));
  }
  return best;
}

}  // namespace prodsdp
