#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ladder/document.hpp"

namespace ladder {

// Sentence boundaries are '.', '!' or '?' followed by whitespace and an
// uppercase letter, unless the token ending at the period is a known
// abbreviation (e.g. "Dr.", "e.g.", month names). A line break always ends
// a sentence, so a headline counts as one.
std::vector<std::string> split_sentences(std::string_view text);

// First date expression in the text, scanning left to right. Recognized
// forms: "July 13, 2020", "13 July 2020", "July 2020", "13/07/2020",
// "2020-07-13", and a bare year. Years outside [1990, 2099] are ignored.
std::optional<int> first_year_in(std::string_view text);

// Publication year: first date expression within the first five sentences.
std::optional<int> extract_year(const Document& doc);

}  // namespace ladder
