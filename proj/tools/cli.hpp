#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace analogy::cli {

// Runs one CLI invocation. args[0] is the program name. Returns the process
// exit status: 0 on success, 1 on a runtime failure, 2 on a usage error.
// Failures print exactly one line "error: <kind>: <message>" to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace analogy::cli
