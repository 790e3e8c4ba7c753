#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace leadsel::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kUsage = 2,
  kInfeasible = 3,
  kDegenerate = 4,
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "7..12", "7,9,11" or a mix such as "3,5..7".
std::vector<std::size_t> parse_count_list(const std::string& text);

}  // namespace leadsel::cli
