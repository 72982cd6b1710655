#pragma once

#include <string_view>
#include <vector>

namespace dpistab::cli {

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { Ok = 0, Usage = 2, NumericFailure = 3 };

/// `start:stop:step` (endpoints inclusive within half a step) or a single value.
std::vector<double> parse_range(std::string_view text);

int run(int argc, char** argv);

}  // namespace dpistab::cli
