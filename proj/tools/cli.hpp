#pragma once

#include <string>
#include <vector>

namespace crex::cli {

// Entry point shared by the binary and the CLI tests.
int run(std::vector<std::string> args);

}  // namespace crex::cli
