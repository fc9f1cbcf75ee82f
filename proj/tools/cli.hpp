#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace microswim::cli {

// Entry point of the `microswim` tool. args excludes the program name.
// Returns 0 on success, 2 on usage or configuration errors, 1 on runtime errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace microswim::cli
