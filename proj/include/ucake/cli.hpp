#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ucake {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitBudget = 2,
  kExitViolation = 3,
};

/// Runs one subcommand. args excludes the program name. Normal output goes to
/// out and diagnostics to err; both are deterministic for identical inputs
/// except for the timings printed by `bench`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ucake
