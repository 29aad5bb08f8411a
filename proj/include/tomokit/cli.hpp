// Command-line front door. Exit codes: 0 success, 2 input/validation failure,
// 3 numerical failure (non-finite loss).
#pragma once

#include <string>
#include <vector>

namespace tomokit::cli {

int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace tomokit::cli
