#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dtcae {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitDivergence = 4,
  kExitGradcheck = 5,
};

/// Runs one CLI invocation (args exclude the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dtcae
