#pragma once

#include <iosfwd>

namespace choreo {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
/// Verification failed, the verdict disagrees with the computation, or a collision occurred.
inline constexpr int kExitFail = 1;
/// Usage, parse or precondition error.
inline constexpr int kExitUsage = 2;

/// Runs the `gen`, `simulate`, `analyze` and `verify` subcommands. Summaries
/// go to `out` as one JSON line; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace choreo
