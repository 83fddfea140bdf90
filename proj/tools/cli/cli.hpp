#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace driveclone::cli {

/// Runs the command line. Returns 0 on success, 1 when a command fails
/// (one "error: <kind>: <message>" line on `err`) and 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace driveclone::cli
