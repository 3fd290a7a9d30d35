#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace prodsdp {

// Exit codes.  Everything else the commands print is for people.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;     // usage error, or a suite row failed
inline constexpr int kExitBadInput = 2;   // unreadable or malformed input file
inline constexpr int kExitNotOptimal = 3;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prodsdp
