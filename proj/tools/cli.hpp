#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairness::cli {

// Runs the command line `args` (without the program name). Reports go to
// `out`, diagnostics to `err`. Returns the process exit status: 0 when the
// computation ran, 1 on input or computation errors, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairness::cli
