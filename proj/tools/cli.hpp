#pragma once

#include <string>
#include <vector>

namespace goq::cli {

// Exit codes: 0 success, 1 configuration error, 2 numeric failure (including
// an unreachable fig6 target, after partial results are written).
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace goq::cli
