#pragma once

#include <string>
#include <vector>

namespace slcone {

// Exit codes: 0 success, 2 precondition violation, 3 honest classification
// failure, 64 usage error.
int cli_run(const std::vector<std::string>& args);
int cli_run(int argc, char** argv);

}  // namespace slcone
