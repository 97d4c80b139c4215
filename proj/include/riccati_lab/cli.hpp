#pragma once

#include <string>
#include <vector>

namespace rlab {

// Runs one command against a scenario file and writes the report files.
// args is argv without the program name. Returns the process exit code:
// 0 success, 1 numerical failure, 2 usage or validation error.
int run_cli(const std::vector<std::string>& args);

std::string cli_usage();

}  // namespace rlab
