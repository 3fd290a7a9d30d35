#include "prodsdp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace prodsdp {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

// Non-blank lines with comments stripped, split on whitespace.
std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Line l{number, {}};
    std::size_t pos = 0;
    while (true) {
      pos = line.find_first_not_of(" \t\r", pos);
      if (pos == std::string_view::npos) break;
      const auto end = line.find_first_of(" \t\r", pos);
      l.tokens.push_back(line.substr(pos, end - pos));
      if (end == std::string_view::npos) break;
      pos = end;
    }
    if (!l.tokens.empty()) out.push_back(std::move(l));
  }
  return out;
}

double to_double(const Line& l, std::string_view tok) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError(l.number, "expected a finite number, got '" + std::string(tok) + "'");
  return v;
}

std::size_t to_index(const Line& l, std::string_view tok) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(l.number, "expected a non-negative integer, got '" + std::string(tok) + "'");
  return v;
}

void expect_arity(const Line& l, std::size_t n) {
  if (l.tokens.size() != n)
    throw ParseError(l.number, "expected " + std::to_string(n) + " fields, got " +
                                   std::to_string(l.tokens.size()));
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

void emit_triples(std::ostringstream& os, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (m(i, j) != 0.0) os << i << ' ' << j << ' ' << fmt(m(i, j)) << '\n';
}

}  // namespace

SdpProgram parse_program(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(0, "empty program file");

  const Line& head = lines.front();
  if (head.tokens[0] != "DIM") throw ParseError(head.number, "expected 'DIM n'");
  expect_arity(head, 2);
  const std::size_t n = to_index(head, head.tokens[1]);
  if (n == 0) throw ParseError(head.number, "dimension must be positive");

  SdpProgram p;
  Matrix* target = nullptr;
  std::set<std::pair<std::size_t, std::size_t>> filled;
  bool have_objective = false;
  bool ended = false;

  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& l = lines[k];
    const auto key = l.tokens[0];
    if (ended) throw ParseError(l.number, "content after END");
    if (key == "OBJECTIVE") {
      expect_arity(l, 1);
      if (have_objective) throw ParseError(l.number, "second OBJECTIVE section");
      have_objective = true;
      p.objective = Matrix(n, n);
      target = &p.objective;
    } else if (key == "EQ" || key == "LE") {
      expect_arity(l, 2);
      if (!have_objective) throw ParseError(l.number, "constraint before OBJECTIVE");
      p.constraints.push_back({Matrix(n, n), to_double(l, l.tokens[1]),
                               key == "EQ" ? Relation::kEq : Relation::kLe});
      target = &p.constraints.back().a;
    } else if (key == "NONNEG") {
      expect_arity(l, 1);
      if (!have_objective) throw ParseError(l.number, "NONNEG before OBJECTIVE");
      p.nonneg.emplace_back(n, n);
      target = &p.nonneg.back();
    } else if (key == "END") {
      expect_arity(l, 1);
      ended = true;
      continue;
    } else {
      if (!target) throw ParseError(l.number, "entry outside any section");
      expect_arity(l, 3);
      const std::size_t i = to_index(l, l.tokens[0]);
      const std::size_t j = to_index(l, l.tokens[1]);
      if (i >= n || j >= n) throw ParseError(l.number, "index out of range");
      if (i > j) throw ParseError(l.number, "entries must be upper-triangle (i <= j)");
      if (!filled.insert({i, j}).second) throw ParseError(l.number, "duplicate entry");
      const double v = to_double(l, l.tokens[2]);
      (*target)(i, j) = v;
      (*target)(j, i) = v;
      continue;
    }
    filled.clear();
  }
  if (!have_objective) throw ParseError(lines.back().number, "missing OBJECTIVE");
  if (!ended) throw ParseError(lines.back().number, "missing END");
  return p;
}

std::string emit_program(const SdpProgram& p) {
  require_valid(p);
  const SdpProgram c = canonicalize(p);
  std::ostringstream os;
  os << "DIM " << c.dim() << '\n' << "OBJECTIVE\n";
  emit_triples(os, c.objective);
  for (const auto& row : c.constraints) {
    os << to_string(row.rel) << ' ' << fmt(row.rhs) << '\n';
    emit_triples(os, row.a);
  }
  for (const auto& b : c.nonneg) {
    os << "NONNEG\n";
    emit_triples(os, b);
  }
  os << "END\n";
  return os.str();
}

Graph parse_graph(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(0, "empty graph file");
  Graph g;
  expect_arity(lines[0], 1);
  g.n = to_index(lines[0], lines[0].tokens[0]);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& l = lines[k];
    expect_arity(l, 2);
    g.edges.emplace_back(to_index(l, l.tokens[0]), to_index(l, l.tokens[1]));
    try {
      Graph{g.n, {g.edges.back()}}.check();
    } catch (const std::invalid_argument& e) {
      throw ParseError(l.number, e.what());
    }
  }
  return g;
}

std::string emit_graph(const Graph& g) {
  g.check();
  std::ostringstream os;
  os << g.n << '\n';
  for (const auto& [i, j] : g.edges) os << i << ' ' << j << '\n';
  return os.str();
}

SignMatrix parse_sign_matrix(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(0, "empty sign matrix file");
  expect_arity(lines[0], 2);
  const std::size_t m = to_index(lines[0], lines[0].tokens[0]);
  const std::size_t n = to_index(lines[0], lines[0].tokens[1]);
  if (m == 0 || n == 0) throw ParseError(lines[0].number, "sizes must be positive");
  if (lines.size() != m + 1)
    throw ParseError(lines.back().number, "expected " + std::to_string(m) + " rows");
  Matrix a(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const Line& l = lines[i + 1];
    expect_arity(l, n);
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = to_double(l, l.tokens[j]);
      if (a(i, j) != 1.0 && a(i, j) != -1.0) throw ParseError(l.number, "entries must be +1 or -1");
    }
  }
  return SignMatrix(std::move(a));
}

std::string emit_sign_matrix(const SignMatrix& m) {
  std::ostringstream os;
  os << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m.matrix()(i, j);
    os << '\n';
  }
  return os.str();
}

Game parse_game(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(0, "empty game file");
  const Line& head = lines[0];
  expect_arity(head, 4);
  Game g = Game::make(to_index(head, head.tokens[0]), to_index(head, head.tokens[1]),
                      to_index(head, head.tokens[2]), to_index(head, head.tokens[3]));
  const std::size_t want = 1 + g.num_s + g.num_s * g.num_t;
  if (lines.size() != want)
    throw ParseError(lines.back().number, "expected " + std::to_string(want) +
                                              " non-blank lines, got " +
                                              std::to_string(lines.size()));
  std::size_t k = 1;
  for (std::size_t s = 0; s < g.num_s; ++s, ++k) {
    expect_arity(lines[k], g.num_t);
    for (std::size_t t = 0; t < g.num_t; ++t)
      g.prob[s * g.num_t + t] = to_double(lines[k], lines[k].tokens[t]);
  }
  for (std::size_t s = 0; s < g.num_s; ++s)
    for (std::size_t t = 0; t < g.num_t; ++t, ++k) {
      expect_arity(lines[k], g.num_u * g.num_w);
      for (std::size_t u = 0; u < g.num_u; ++u)
        for (std::size_t w = 0; w < g.num_w; ++w) {
          const auto tok = lines[k].tokens[u * g.num_w + w];
          if (tok != "0" && tok != "1") throw ParseError(lines[k].number, "predicate values must be 0 or 1");
          g.v(s, t, u, w) = tok == "1";
        }
    }
  try {
    g.check();
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
  return g;
}

std::string emit_game(const Game& g) {
  g.check();
  std::ostringstream os;
  os << g.num_s << ' ' << g.num_t << ' ' << g.num_u << ' ' << g.num_w << '\n';
  for (std::size_t s = 0; s < g.num_s; ++s) {
    for (std::size_t t = 0; t < g.num_t; ++t) os << (t ? " " : "") << fmt(g.p(s, t));
    os << '\n';
  }
  for (std::size_t s = 0; s < g.num_s; ++s)
    for (std::size_t t = 0; t < g.num_t; ++t) {
      for (std::size_t i = 0; i < g.num_u * g.num_w; ++i)
        os << (i ? " " : "") << int(g.v(s, t, i / g.num_w, i % g.num_w));
      os << '\n';
    }
  return os.str();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace prodsdp
