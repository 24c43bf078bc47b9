#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace secidx {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInvariant = 2;

/// Runs the command line `args` (without the program name). Reports go to
/// `out`, diagnostics and usage to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace secidx
