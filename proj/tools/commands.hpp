#pragma once

#include <string>
#include <vector>

namespace ratmax::cli {

/// Runs one invocation of the `ratmax` tool; args excludes the program
/// name. Returns the process exit code (0 iff every requested artifact was
/// written and re-read as schema-valid; CLI11's codes on usage errors).
int run(const std::vector<std::string>& args);

} // namespace ratmax::cli
