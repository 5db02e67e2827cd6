#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crowdrank {

/// Runs one `crowdrank` subcommand. `args` excludes the program name.
/// Returns the process exit status; diagnostics go to `err`, reports to `out`.
///
/// Subcommands: index, signals extract, signals dump, features, train,
/// rank, eval, compare, synth.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crowdrank
