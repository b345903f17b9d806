#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nestquad::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConvergence = 2,
  kIo = 3,
  kMissing = 4,
  kVerification = 5,
};

/// Runs the command line without the program name, e.g. {"gauss", "--n", "3"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nestquad::cli
