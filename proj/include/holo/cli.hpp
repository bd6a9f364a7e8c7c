#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holo {

/// Runs the command-line front end. args excludes the program name.
/// Returns the exit status: 0 ok, 2 config error, 3 I/O error,
/// 4 numerical error. Failures print one line to err:
///   holo: error[<config|io|numerical>]: <message>
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holo
