#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace camp {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Splits on `sep` without trimming; an empty input yields one empty field.
std::vector<std::string_view> split(std::string_view text, char sep);

/// Strips ASCII whitespace (including a trailing '\r').
std::string_view trim(std::string_view text);

}  // namespace camp
