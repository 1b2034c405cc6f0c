#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blurfitts::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_input_error = 2,
  exit_computation_error = 3,
};

/// Runs one invocation. `args` excludes the program name. Results go to the
/// files named by the options (or `out` for "-"); diagnostics go to `err`
/// as single-line JSON records.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blurfitts::cli
