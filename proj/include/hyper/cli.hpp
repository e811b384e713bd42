#pragma once

#include <ostream>

namespace hyper {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitDomainError = 3,
  kExitInternalError = 4,
};

/// Entry point of the `hyper` tool; writes results to out and diagnostics to err.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyper
