#include <gtest/gtest.h>

#include <string>

#include "prodsdp/io.hpp"
#include "prodsdp/library.hpp"

using namespace prodsdp;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    parse_program(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST(ProgramText, RoundTripsBuilders) {
  const Game g = Game::xor_game();
  const std::vector<SdpProgram> programs = {
      counterexample_program(),
      theta_program(Graph::cycle(5)),
      gamma2inf_program(SignMatrix{{1, 1, -1}, {1, -1, 1}}),
      fl_sigma_program(g),
      fl_sigma_bar_prime_program(g),
      product(counterexample_program(), gamma2inf_program(SignMatrix{{-1}})),
  };
  for (const auto& p : programs) {
    const std::string text = emit_program(p);
    const SdpProgram back = parse_program(text);
    EXPECT_EQ(back, canonicalize(p));
    EXPECT_EQ(emit_program(back), text);
  }
}

TEST(ProgramText, SeventeenDigits) {
  SdpProgram p{Matrix{{0.1}}, {{Matrix{{1.0 / 3.0}}, 2.0 / 3.0, Relation::kEq}}, {}};
  const SdpProgram back = parse_program(emit_program(p));
  EXPECT_EQ(back.objective(0, 0), 0.1);
  EXPECT_EQ(back.constraints[0].a(0, 0), 1.0 / 3.0);
  EXPECT_EQ(back.constraints[0].rhs, 2.0 / 3.0);
}

TEST(ProgramText, CommentsAndBlankLines) {
  const SdpProgram p = parse_program(
      "# header\n\nDIM 1\nOBJECTIVE\n0 0 1   # the only entry\nEQ 1\n0 0 1\nEND\n");
  EXPECT_EQ(p.dim(), 1u);
  EXPECT_EQ(p.constraints.size(), 1u);
}

TEST(ProgramText, Diagnostics) {
  EXPECT_EQ(error_line(""), 0u);
  EXPECT_EQ(error_line("DIM x\n"), 1u);
  EXPECT_EQ(error_line("DIM 2\nOBJECTIVE\n1 0 1\nEND\n"), 3u);    // lower triangle
  EXPECT_EQ(error_line("DIM 2\nOBJECTIVE\n0 2 1\nEND\n"), 3u);    // out of range
  EXPECT_EQ(error_line("DIM 2\nOBJECTIVE\n0 1 1\n0 1 2\nEND\n"), 4u);
  EXPECT_EQ(error_line("DIM 2\nEQ 1\nEND\n"), 2u);
  EXPECT_EQ(error_line("DIM 2\nOBJECTIVE\n0 1 nan\nEND\n"), 3u);
  EXPECT_EQ(error_line("DIM 2\nOBJECTIVE\nEND\nEQ 1\n"), 4u);
  EXPECT_EQ(error_line("DIM 2\nOBJECTIVE\n"), 2u);                // no END
}

TEST(GraphText, RoundTrip) {
  const Graph g = Graph::cycle(5);
  EXPECT_EQ(parse_graph(emit_graph(g)), g);
  EXPECT_THROW(parse_graph("3\n0 3\n"), ParseError);
  EXPECT_THROW(parse_graph("3\n0\n"), ParseError);
}

TEST(SignMatrixText, RoundTrip) {
  const SignMatrix m{{1, -1, 1}, {-1, -1, 1}};
  EXPECT_EQ(parse_sign_matrix(emit_sign_matrix(m)).matrix(), m.matrix());
  EXPECT_THROW(parse_sign_matrix("1 2\n1 0\n"), ParseError);
  EXPECT_THROW(parse_sign_matrix("2 1\n1\n"), ParseError);
}

TEST(GameText, RoundTrip) {
  const Game g = Game::xor_game();
  EXPECT_EQ(parse_game(emit_game(g)), g);
  const Game sq = game_product(g, g);
  EXPECT_EQ(parse_game(emit_game(sq)), sq);
  EXPECT_THROW(parse_game("1 1 1 1\n0.5\n1\n"), ParseError);  // not a distribution
  EXPECT_THROW(parse_game("1 1 1 1\n1\n2\n"), ParseError);
}
