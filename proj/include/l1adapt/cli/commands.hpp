#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "l1adapt/error.hpp"

namespace l1adapt::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,  // parse, validation or stability failures
  kExitInfeasible = 3,
  kExitDiverged = 4,
};

int exit_code_for(ErrorKind kind);

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace l1adapt::cli
