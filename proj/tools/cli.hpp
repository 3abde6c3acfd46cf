#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hyperu::cli {

/// Runs the command line `args` (args[0] is the program name).
/// Returns 0 on success, 1 on usage or input errors, 2 on numerical or
/// simulation failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperu::cli
