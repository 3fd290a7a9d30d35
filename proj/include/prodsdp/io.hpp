#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "prodsdp/library.hpp"
#include "prodsdp/model.hpp"

namespace prodsdp {

// Thrown by every parser; line() is 1-based, 0 when no line applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Program text:
//
//   DIM n
//   OBJECTIVE
//   i j value          upper-triangle triples, 0-based
//   EQ rhs | LE rhs    one section per constraint row
//   NONNEG             one section per nonneg row
//   END
//
// '#' starts a comment.  Emission writes EQ rows before LE rows, triples in
// (i, j) order and every number with 17 significant digits.
SdpProgram parse_program(std::string_view text);
std::string emit_program(const SdpProgram& p);

// First line n, then one "i j" line per edge.
Graph parse_graph(std::string_view text);
std::string emit_graph(const Graph& g);

// "m n", then m rows of +1 / -1 entries.
SignMatrix parse_sign_matrix(std::string_view text);
std::string emit_sign_matrix(const SignMatrix& m);

// "|S| |T| |U| |W|", then |S| rows of P over t, then one V row per (s, t)
// listing the |U| * |W| predicate values with w fastest.
Game parse_game(std::string_view text);
std::string emit_game(const Game& g);

// Whole-file helpers; failures to open throw std::runtime_error.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace prodsdp
