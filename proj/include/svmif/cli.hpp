#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace svmif {

enum ExitCode : int {
    exit_ok = 0,
    exit_input_error = 2,     ///< bad arguments, config, data or model file
    exit_not_converged = 3,   ///< artifacts written, but a tolerance was missed
    exit_internal_error = 4,
};

/// Runs one command line; args[0] is the program name.
/// Commands: gen-data, train, extract, refine, eval, rules, experiment.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace svmif
