#pragma once

// Command-line front end. Reports go to `out`, diagnostics to `err`.

#include <ostream>
#include <string>
#include <vector>

namespace surfquant::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Returns 0 when all
/// checks in scope pass, 1 on a failed check or numerical failure, 2 on a
/// usage or expression parse error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace surfquant::cli
