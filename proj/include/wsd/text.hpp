#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wsd {

std::string to_lower(std::string_view s);

// Shortest round-trippable text for a double ("%.17g" style, but trimmed when exact).
std::string format_double(double value);

// Fixed-precision rendering used in human-readable reports.
std::string format_fixed(double value, int digits);

std::vector<std::string> split(std::string_view s, char delimiter);

std::string join(const std::vector<std::string>& parts, std::string_view separator);

}  // namespace wsd
