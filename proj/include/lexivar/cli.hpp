#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lexivar {

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

/// Runs `lexivar inspect ...` / `lexivar visualize ...`. `args` excludes the
/// program name. Diagnostics go to `err` as a single line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexivar
