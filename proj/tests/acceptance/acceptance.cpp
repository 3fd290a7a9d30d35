// One PASS/FAIL line per criterion.  A criterion passes when all of its suite
// rows pass and, where it has one, its wall-time budget holds.
#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include "prodsdp/cli.hpp"
#include "prodsdp/suite.hpp"

using namespace prodsdp;

int main() {
  // Seconds; 0 means no budget of its own.
  constexpr std::array<double, kNumCriteria + 1> kBudget = {0, 1, 30, 60, 0, 0, 0, 180, 180, 0};
  constexpr double kSuiteBudget = 300;

  std::array<double, kNumCriteria + 1> seconds{};
  SuiteOptions opts;
  opts.on_timing = [&](int c, double s) { seconds[c] = s; };
  const auto rows = run_suite(opts);
  const std::string first = format_suite(rows);

  // Second run goes through the command line, as a user would.
  std::ostringstream out, err;
  run_cli({"suite"}, out, err);
  const bool identical = out.str() == first;

  double total = 0;
  for (double s : seconds) total += s;

  bool all = true;
  for (int c = 1; c <= kNumCriteria; ++c) {
    int n = 0, passed = 0;
    for (const auto& r : rows)
      if (r.criterion == c) {
        ++n;
        passed += r.pass;
      }
    bool ok = n > 0 && passed == n;
    std::string note = std::to_string(passed) + "/" + std::to_string(n) + " rows";
    if (kBudget[c] > 0) {
      char buf[64];
      std::snprintf(buf, sizeof buf, ", %.2fs of %.0fs", seconds[c], kBudget[c]);
      note += buf;
      ok = ok && seconds[c] < kBudget[c];
    }
    if (c == kNumCriteria) {
      note += identical ? ", two reports byte-identical" : ", reports differ";
      ok = ok && identical;
    }
    all = all && ok;
    std::printf("criterion %d: %s (%s)\n", c, ok ? "PASS" : "FAIL", note.c_str());
  }
  const bool fast = total < kSuiteBudget;
  std::printf("suite wall time: %s (%.1fs of %.0fs)\n", fast ? "PASS" : "FAIL", total, kSuiteBudget);
  if (!all || !fast) std::fputs(first.c_str(), stdout);
  return all && fast ? 0 : 1;
}
