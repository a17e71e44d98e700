#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace cinglear::csv {

std::vector<std::string> split_line(std::string_view line, char sep = ',');

/// Strict full-field parse; throws Error(ParseError) on garbage.
double parse_double(std::string_view field);

/// Shortest decimal form that round-trips exactly.
std::string format_double(double value);

} // namespace cinglear::csv
