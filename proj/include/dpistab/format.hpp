#pragma once

#include <string>

namespace dpistab {

/// Locale-independent text for a double with 17 significant digits (round-trips exactly).
std::string format_double(double value);

}  // namespace dpistab
