#pragma once

#include <string>

namespace weldnorm {

/// Shortest round-trip decimal form (std::to_chars); infinities serialize as "inf"/"-inf".
std::string format_double(double v);

/// Parses "inf"/"-inf" and plain decimals.
double parse_double(const std::string& s);

}  // namespace weldnorm
