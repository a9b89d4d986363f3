#ifndef MFSPEC_CLI_HPP
#define MFSPEC_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace mfspec {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitHypothesis = 1, kExitInput = 2 };

/// Runs one command line (without the program name). Artifacts go to the
/// files named by --out, or to `out` when no file is given; diagnostics go
/// to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfspec

#endif  // MFSPEC_CLI_HPP
