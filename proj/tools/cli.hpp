#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adnms::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs the command line `args` (without the program name). Data goes to
// files or `out`; progress and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adnms::cli
