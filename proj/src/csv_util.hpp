#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rcnlin::detail {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

double parse_double(std::string_view text);

std::vector<std::string> split_csv_line(std::string_view line);

/// Next non-empty line with trailing CR removed; false at end of input.
bool next_csv_line(std::istream& in, std::string& line);

} // namespace rcnlin::detail
