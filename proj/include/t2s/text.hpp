#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace t2s {

// ASCII lowercase. Non-ASCII bytes pass through unchanged.
std::string to_lower(std::string_view s);

std::string trim(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercased alphanumeric runs; everything else separates words.
std::vector<std::string> word_tokens(std::string_view s);

// True when `needle` occurs in `haystack` bounded by non-alphanumeric
// characters (or the string ends) on both sides.
bool contains_whole_word(std::string_view haystack, std::string_view needle);

}  // namespace t2s
