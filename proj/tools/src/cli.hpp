#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace resacc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitInput = 3,
  kExitInternal = 4,
};

// Runs one resacc command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace resacc::cli
