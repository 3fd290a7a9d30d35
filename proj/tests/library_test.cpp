#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "prodsdp/library.hpp"

using namespace prodsdp;

TEST(Graph, BuildersAndCheck) {
  EXPECT_EQ(Graph::cycle(5).edges.size(), 5u);
  EXPECT_EQ(Graph::complete(4).edges.size(), 6u);
  EXPECT_THROW((Graph{3, {{1, 1}}}.check()), std::invalid_argument);
  EXPECT_THROW((Graph{3, {{0, 3}}}.check()), std::invalid_argument);
}

TEST(SignMatrix, RejectsOtherEntries) {
  EXPECT_THROW(SignMatrix(Matrix{{1, 0}}), std::invalid_argument);
  EXPECT_NO_THROW(SignMatrix(Matrix{{1, -1}}));
}

TEST(Theta, Census) {
  const SdpProgram p = theta_program(Graph::cycle(5));
  EXPECT_EQ(p.dim(), 5u);
  EXPECT_EQ(p.num_constraints(), 6u);  // 5 edges + trace
  EXPECT_TRUE(p.all_equality());
  EXPECT_EQ(p.num_nonneg(), 0u);
  EXPECT_EQ(p.objective, Matrix(5, 5, 1.0));
}

TEST(Gamma2Inf, OneByOneCensus) {
  const SdpProgram p = gamma2inf_program(SignMatrix{{1}});
  EXPECT_EQ(p.dim(), 2u);
  EXPECT_EQ(p.num_constraints(), 1u);
  ASSERT_EQ(p.num_nonneg(), 2u);
  EXPECT_EQ(p.nonneg[0], p.nonneg[1]);  // both orientations symmetrize alike
  EXPECT_EQ(p.nonneg[0](0, 0), 0.0);
  EXPECT_NE(p.nonneg[0](0, 1), 0.0);
}

TEST(Counterexample, Shape) {
  const SdpProgram p = counterexample_program();
  EXPECT_EQ(p.dim(), 2u);
  EXPECT_EQ(p.num_constraints(), 1u);
  EXPECT_EQ(p.num_nonneg(), 2u);
}

TEST(Game, XorValue) {
  const Game g = Game::xor_game();
  EXPECT_NO_THROW(g.check());
  EXPECT_DOUBLE_EQ(game_value(g), 0.75);
}

TEST(Game, XorSquaredIsTenSixteenths) {
  // Known value of two parallel copies of the XOR game.
  const Game g = Game::xor_game();
  EXPECT_DOUBLE_EQ(game_value(game_product(g, g)), 0.625);
}

TEST(Game, CheckRejectsBadDistribution) {
  Game g = Game::xor_game();
  g.prob[0] = 0.5;
  EXPECT_THROW(g.check(), std::invalid_argument);
}

TEST(Game, EnumerationCap) {
  // 2^30 deterministic strategies for Alice.
  Game b = Game::make(30, 1, 2, 2);
  for (double& p : b.prob) p = 1.0 / 30;
  EXPECT_THROW(game_value(b), std::length_error);
}

TEST(Game, ObjectiveIndexing) {
  const Game g = Game::xor_game();
  const Matrix c = game_objective(g);
  const std::size_t alice = g.num_s * g.num_u;
  EXPECT_EQ(bob_index(g, 0, 0), alice);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t w = 0; w < 2; ++w)
          EXPECT_EQ(c(alice_index(g, s, u), bob_index(g, t, w) - alice),
                    g.p(s, t) * g.v(s, t, u, w));
}

TEST(Sigma, CensusAndSymmetry) {
  const Game g = Game::xor_game();
  const SdpProgram s = fl_sigma_program(g);
  EXPECT_EQ(s.dim(), 8u);
  EXPECT_TRUE(s.all_equality());
  EXPECT_TRUE(validate(s).empty());
  const SdpProgram b = fl_sigma_bar_prime_program(g);
  EXPECT_EQ(b.dim(), 8u);
  EXPECT_TRUE(validate(b).empty());
  EXPECT_EQ(b.num_nonneg(), 16u);  // one per cross entry
}

TEST(IndependenceNumber, Known) {
  EXPECT_EQ(independence_number(Graph::cycle(5)), 2u);
  EXPECT_EQ(independence_number(Graph::complete(5)), 1u);
  EXPECT_EQ(independence_number(Graph{4, {}}), 4u);
  EXPECT_EQ(independence_number(Graph::cycle(6)), 3u);
}
