#pragma once

// Command-line front end. dispatch() is the whole CLI behind a testable
// interface: it parses arguments, runs the requested experiment or query,
// writes outputs, and maps failures to exit codes (2 for configuration
// errors, 1 for runtime failures) with one JSON diagnostic line on the
// error stream.

#include <iosfwd>
#include <string>
#include <vector>

namespace seqreg {

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err);

}  // namespace seqreg
