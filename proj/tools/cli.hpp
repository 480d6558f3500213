#ifndef ROUGHPATH_TOOLS_CLI_HPP
#define ROUGHPATH_TOOLS_CLI_HPP

#include <ostream>

namespace rp::cli {

/// Exit codes: 0 when every residual is within tolerance, 1 when one is not, 2 on bad input.
inline constexpr int exit_ok = 0;
inline constexpr int exit_residual = 1;
inline constexpr int exit_error = 2;

/// Runs the rpath command line with results on out and diagnostics on err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rp::cli

#endif  // ROUGHPATH_TOOLS_CLI_HPP
