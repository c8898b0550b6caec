#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polariton::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_check_mismatch = 1,
  exit_config_error = 2,
  exit_numerical_error = 3,
  exit_io_error = 4,
};

/// Entry point of the `polariton` tool. Reports go to `out`; errors and
/// warnings go to `err` as one JSON object per line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polariton::cli
