// cli.hpp
// In-process entry point of the `entangle` command line tool, stream-injected
// so tests can drive it without spawning processes.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entangle::cli {

// args excludes the program name. Exit codes:
//   0 success, 1 usage, 2 input parse error, 3 invalid state,
//   4 numerical failure or ambiguity, 5 property violation.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace entangle::cli
