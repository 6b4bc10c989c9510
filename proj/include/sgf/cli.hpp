#pragma once

#include <string>
#include <vector>

namespace sgf::cli {

// Entry point shared by the binary and the tests. Returns the process exit
// code; failures print one machine-readable JSON error line to stderr.
int run(const std::vector<std::string>& args);

}  // namespace sgf::cli
