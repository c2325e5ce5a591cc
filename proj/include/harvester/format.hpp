#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace harvester {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double v);

/// Parses a whole string as a double; throws std::invalid_argument otherwise.
double parse_number(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace harvester
