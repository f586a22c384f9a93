#ifndef CHEMSCORE_TEXT_HPP
#define CHEMSCORE_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace chemscore {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_on(std::string_view s, char sep);

// Collapses internal whitespace runs to single spaces and trims the ends.
std::string normalize_ws(std::string_view s);

// Number of non-overlapping occurrences of `needle` in `s`.
std::size_t count_occurrences(std::string_view s, std::string_view needle);

std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - dist/max(len); 1.0 for two empty strings.
double levenshtein_similarity(std::string_view a, std::string_view b);

}  // namespace chemscore

#endif  // CHEMSCORE_TEXT_HPP
