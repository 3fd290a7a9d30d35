#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "prodsdp/cli.hpp"
#include "prodsdp/io.hpp"
#include "prodsdp/library.hpp"

using namespace prodsdp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(PRODSDP_TEST_DATA) + "/" + name; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("prodsdp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    write_text(path(name), text);
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SolveCounterexample) {
  const auto f = write("ce.sdp", emit_program(counterexample_program()));
  const Outcome r = run({"solve", f});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("status Optimal"), std::string::npos);
  EXPECT_NE(r.out.find("primal 0.000000"), std::string::npos);
}

TEST_F(Cli, SolveTrivial) {
  const auto f = write("one.sdp", "DIM 1\nOBJECTIVE\n0 0 1\nEQ 1\n0 0 1\nEND\n");
  const Outcome r = run({"solve", f});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("primal 1.000000"), std::string::npos);
}

TEST_F(Cli, SolveMalformed) {
  const auto f = write("bad.sdp", "DIM 2\nOBJECTIVE\n0 1 one\nEND\n");
  const Outcome r = run({"solve", f});
  EXPECT_EQ(r.code, kExitBadInput);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  EXPECT_EQ(run({"solve", path("missing.sdp")}).code, kExitBadInput);
}

TEST_F(Cli, SolveNotOptimal) {
  const auto f = write("c5.sdp", emit_program(theta_program(Graph::cycle(5))));
  EXPECT_EQ(run({"solve", f, "--max-iters", "1"}).code, kExitNotOptimal);
  EXPECT_EQ(run({"solve", f, "--gap-tol", "0"}).code, kExitFailed);
  EXPECT_EQ(run({"solve", f, "--gap-tol", "abc"}).code, kExitFailed);
}

TEST_F(Cli, Check) {
  const Outcome g = run({"check", write("g.sdp", emit_program(gamma2inf_program(SignMatrix{{1, 1}, {1, -1}})))});
  EXPECT_EQ(g.code, kExitOk);
  EXPECT_NE(g.out.find("Main applies; u = all-ones"), std::string::npos);
  EXPECT_NE(g.out.find("left {0, 1}, right {2, 3}"), std::string::npos);

  const Outcome t = run({"check", write("t.sdp", emit_program(theta_program(Graph::cycle(5))))});
  EXPECT_NE(t.out.find("MS-1 applies (J PSD)"), std::string::npos);

  const Outcome s = run({"check", write("s.sdp", emit_program(fl_sigma_program(Game::xor_game())))});
  EXPECT_NE(s.out.find("\nNone\n"), std::string::npos);
}

TEST_F(Cli, Product) {
  const auto ce = write("ce.sdp", emit_program(counterexample_program()));
  const auto out = path("sq.sdp");
  ASSERT_EQ(run({"product", ce, ce, "-o", out}).code, kExitOk);
  const SdpProgram sq = parse_program(read_text(out));
  EXPECT_EQ(sq.dim(), 4u);
  EXPECT_EQ(sq, canonicalize(product(counterexample_program(), counterexample_program())));

  const auto one = write("one.sdp", "DIM 1\nOBJECTIVE\n0 0 1\nEQ 1\n0 0 1\nEND\n");
  const Outcome r = run({"product", one, one});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(parse_program(r.out).dim(), 1u);
}

TEST_F(Cli, Generate) {
  const Outcome ce = run({"generate", "counterexample"});
  EXPECT_EQ(ce.code, kExitOk);
  EXPECT_EQ(ce.out, emit_program(counterexample_program()));

  const Outcome th = run({"generate", "theta", data("c5.graph")});
  ASSERT_EQ(th.code, kExitOk);
  const SdpProgram t = parse_program(th.out);
  EXPECT_EQ(t.dim(), 5u);
  EXPECT_EQ(t.num_constraints(), 6u);

  const Outcome g = run({"generate", "gamma2inf", data("one.sm")});
  ASSERT_EQ(g.code, kExitOk);
  const SdpProgram gp = parse_program(g.out);
  EXPECT_EQ(gp.dim(), 2u);
  EXPECT_EQ(gp.num_nonneg(), 2u);

  const auto out = path("bar.sdp");
  ASSERT_EQ(run({"generate", "fl-sigma-bar", data("xor.game"), "-o", out}).code, kExitOk);
  EXPECT_EQ(parse_program(read_text(out)), canonicalize(fl_sigma_bar_prime_program(Game::xor_game())));
  EXPECT_EQ(run({"generate", "fl-sigma", data("xor.game")}).out,
            emit_program(fl_sigma_program(Game::xor_game())));

  EXPECT_EQ(run({"generate", "theta"}).code, kExitBadInput);
  EXPECT_EQ(run({"generate", "theta", data("one.sm")}).code, kExitBadInput);
  EXPECT_NE(run({"generate", "lasserre"}).code, kExitOk);
}

TEST_F(Cli, Usage) {
  EXPECT_EQ(run({}).code, kExitFailed);
  EXPECT_EQ(run({"frobnicate"}).code, kExitFailed);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}
