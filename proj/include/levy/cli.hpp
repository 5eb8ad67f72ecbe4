#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levy {

/// Exit codes of the command-line entry point.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,
  kExitFailed = 2,
  kExitUsage = 64,
  kExitNoInput = 66,
};

/// Runs `levy <subcommand> <config> [flags]`; args excludes the program name.
/// Prints one summary line on out and diagnostics on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace levy
