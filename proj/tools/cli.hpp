#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace heurlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace heurlab::cli
