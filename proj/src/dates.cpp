#include "ladder/dates.hpp"

#include <cctype>
#include <regex>
#include <set>

#include "ladder/text.hpp"

namespace ladder {

namespace {

// Tokens that end with a period without ending the sentence. Compared after
// lowercasing and stripping the trailing period.
const std::set<std::string>& abbreviations() {
  static const std::set<std::string> s = {
      "mr",  "mrs", "ms",  "dr",   "prof", "inc", "ltd", "corp", "co",  "vs",
      "etc", "e.g", "i.e", "fig",  "st",   "no",  "al",  "jan",  "feb", "mar",
      "apr", "jun", "jul", "aug",  "sep",  "sept", "oct", "nov",  "dec", "u.s",
      "u.k", "approx"};
  return s;
}

bool ends_sentence(std::string_view text, std::size_t i) {
  char c = text[i];
  if (c != '.' && c != '!' && c != '?') return false;
  // Needs whitespace then an uppercase letter.
  std::size_t j = i + 1;
  // Allow a closing quote or bracket right after the punctuation.
  while (j < text.size() && (text[j] == '"' || text[j] == '\'' || text[j] == ')')) ++j;
  if (j >= text.size() || !std::isspace(static_cast<unsigned char>(text[j]))) return false;
  while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
  if (j >= text.size() || !(text[j] >= 'A' && text[j] <= 'Z')) return false;
  if (c != '.') return true;
  // Back out if the word ending here is a known abbreviation.
  std::size_t b = i;
  while (b > 0 && !std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
  std::string word = to_lower(text.substr(b, i - b));
  if (abbreviations().count(word)) return false;
  // Single uppercase initial, as in "J. Smith".
  if (i - b == 1 && text[b] >= 'A' && text[b] <= 'Z') return false;
  return true;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&]() {
    std::string t = trim(current);
    if (!t.empty()) out.push_back(t);
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      flush();
      continue;
    }
    current += c;
    if (ends_sentence(text, i)) flush();
  }
  flush();
  return out;
}

namespace {

struct DateMatch {
  std::size_t pos;
  int year;
};

bool year_ok(int y) { return y >= 1990 && y <= 2099; }

void consider(std::optional<DateMatch>& best, std::size_t pos, int year) {
  if (!year_ok(year)) return;
  if (!best || pos < best->pos) best = DateMatch{pos, year};
}

// Word-boundary check for positions adjacent to a match.
bool boundary(std::string_view s, std::size_t idx) {
  return idx >= s.size() || !is_ascii_alnum(s[idx]);
}
bool boundary_before(std::string_view s, std::size_t idx) {
  return idx == 0 || !is_ascii_alnum(s[idx - 1]);
}

void scan(std::string_view text, const std::regex& re, int year_group,
          std::optional<DateMatch>& best) {
  auto begin = std::cregex_iterator(text.data(), text.data() + text.size(), re);
  for (auto it = begin; it != std::cregex_iterator(); ++it) {
    const std::cmatch& m = *it;
    std::size_t pos = static_cast<std::size_t>(m.position(0));
    if (!boundary_before(text, pos) || !boundary(text, pos + static_cast<std::size_t>(m.length(0))))
      continue;
    consider(best, pos, std::stoi(m[static_cast<std::size_t>(year_group)].str()));
  }
}

}  // namespace

std::optional<int> first_year_in(std::string_view text) {
  static const std::string month =
      "(?:Jan(?:uary)?|Feb(?:ruary)?|Mar(?:ch)?|Apr(?:il)?|May|Jun(?:e)?|Jul(?:y)?|"
      "Aug(?:ust)?|Sep(?:t(?:ember)?)?|Oct(?:ober)?|Nov(?:ember)?|Dec(?:ember)?)";
  // "July 13, 2020" and "July 2020"
  static const std::regex month_first(month + "\\.?\\s+(?:([0-9]{1,2})(?:st|nd|rd|th)?,?\\s+)?([0-9]{4})");
  // "13 July 2020"
  static const std::regex day_first("([0-9]{1,2})(?:st|nd|rd|th)?\\s+" + month + ",?\\s+([0-9]{4})");
  // "13/07/2020" (day and month either order)
  static const std::regex slashed("([0-9]{1,2})/([0-9]{1,2})/([0-9]{4})");
  // "2020-07-13"
  static const std::regex iso("([0-9]{4})-([0-9]{2})-([0-9]{2})");
  // bare year
  static const std::regex bare("(19[9][0-9]|20[0-9][0-9])");

  std::optional<DateMatch> best;
  scan(text, month_first, 2, best);
  scan(text, day_first, 2, best);
  scan(text, slashed, 3, best);
  scan(text, iso, 1, best);
  scan(text, bare, 1, best);
  if (!best) return std::nullopt;
  return best->year;
}

std::optional<int> extract_year(const Document& doc) {
  std::vector<std::string> sentences = split_sentences(doc.text);
  std::string window;
  for (std::size_t i = 0; i < sentences.size() && i < 5; ++i) {
    if (!window.empty()) window += '\n';
    window += sentences[i];
  }
  return first_year_in(window);
}

}  // namespace ladder
