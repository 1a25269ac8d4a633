#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vwsd {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// Splits on runs of ASCII whitespace; never yields empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

/// Splits on every occurrence of `sep`, keeping empty fields.
std::vector<std::string> split_on(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Replaces every non-overlapping occurrence of `from`, scanning left to right.
std::string replace_all(std::string text, std::string_view from, std::string_view to);

}  // namespace vwsd
