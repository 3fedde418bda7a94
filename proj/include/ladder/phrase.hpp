#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ladder {

// Per-token tag from a sequence labeler: part of an attack-pattern span or
// not.
enum class TokenTag : std::uint8_t { AttackPattern, Outside };

struct AttackPhrase {
  std::string doc_id;
  int sentence_index = 0;
  std::size_t token_begin = 0;  // [token_begin, token_end) into the sentence
  std::size_t token_end = 0;
  std::string text;  // tokens joined by single spaces

  friend bool operator==(const AttackPhrase&, const AttackPhrase&) = default;
};

// Collapses maximal runs of AttackPattern-tagged tokens into phrases.
// tokens and tags must have equal length.
std::vector<AttackPhrase> merge_tagged_spans(std::span<const std::string> tokens,
                                             std::span<const TokenTag> tags,
                                             const std::string& doc_id, int sentence_index);

// Action verbs that make a candidate phrase an actual behavior description.
// One lowercase verb per line; '#' comments allowed.
std::set<std::string> load_verb_lexicon(const std::filesystem::path& path);
const std::set<std::string>& default_verb_lexicon();

// Keeps phrases containing at least one lexicon verb. Matching is on
// lowercased tokens, directly or after stripping a plural/inflection suffix
// (-s, -ed, -ing, with the dropped-e form restored, so "generating" matches
// "generate"). Everything else, e.g. a stray noun phrase the tagger picked
// up, is discarded.
std::vector<AttackPhrase> filter_invalid_phrases(const std::vector<AttackPhrase>& phrases,
                                                 const std::set<std::string>& lexicon);

struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

// Renders one sentence for a sentence-pair relation classifier:
// "[CLS] ... <e1> head </e1> ... <e2> tail </e2> ...", with the marker
// pairs assigned by argument order, not position order. Spans must be
// non-empty, in bounds, and disjoint.
std::string format_relation_input(std::string_view sentence, CharSpan e1, CharSpan e2);

}  // namespace ladder
