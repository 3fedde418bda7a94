#include "ladder/phrase.hpp"

#include <algorithm>
#include <sstream>

#include "ladder/errors.hpp"
#include "ladder/extraction.hpp"
#include "ladder/text.hpp"

namespace ladder {

std::vector<AttackPhrase> merge_tagged_spans(std::span<const std::string> tokens,
                                             std::span<const TokenTag> tags,
                                             const std::string& doc_id, int sentence_index) {
  if (tokens.size() != tags.size())
    throw ContractError("merge_tagged_spans: " + std::to_string(tokens.size()) + " tokens vs " +
                        std::to_string(tags.size()) + " tags");
  std::vector<AttackPhrase> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (tags[i] != TokenTag::AttackPattern) {
      ++i;
      continue;
    }
    std::size_t b = i;
    std::string text;
    while (i < tokens.size() && tags[i] == TokenTag::AttackPattern) {
      if (!text.empty()) text += ' ';
      text += tokens[i];
      ++i;
    }
    out.push_back({doc_id, sentence_index, b, i, std::move(text)});
  }
  return out;
}

namespace {

std::set<std::string> parse_verb_lines(std::string_view text) {
  std::set<std::string> out;
  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (split_whitespace(line).size() != 1)
      throw ParseError("one verb per line, got '" + line + "'", line_no);
    out.insert(to_lower(line));
  }
  return out;
}

// Same content as data/verb_lexicon.txt; a unit test keeps the two in sync.
const char* kBuiltinVerbs =
    "abuse access acquire activate alter answer append attack authenticate avoid block "
    "broadcast browse bypass call capture change check clean clear click clone close collect "
    "communicate compromise conceal conduct configure connect contact control copy corrupt "
    "crack craft create deactivate decode decrypt defeat degrade delete deliver deny deploy "
    "destroy detect dial disable disguise display disrupt distribute divert download drop dump "
    "eavesdrop elevate embed employ emulate enable encode encrypt enumerate erase escalate "
    "establish evade execute exfiltrate exploit expose extract fake fetch find fingerprint "
    "flood forge forward gain gather generate grab grant harvest hide hijack hold hook "
    "identify impair impersonate implant import infect infiltrate inject insert inspect "
    "install intercept interrupt invoke keylog kill launch leak leverage list listen load lock "
    "log lure maintain manipulate mask masquerade mimic mine mirror misuse modify monitor "
    "mount notify obfuscate observe obtain open operate overlay override overwrite pair parse "
    "patch perform persist phish ping pivot plant poison poll position post prevent probe "
    "propagate proxy pull push query read reboot receive record recruit redirect register "
    "relay remove rename repackage replace replicate report request reset resolve respond "
    "restart restore retrieve reuse reverse revoke root rotate route run save scan schedule "
    "scrape search seize sell send serve set share sideload sign silence simulate skim sleep "
    "smuggle sniff snoop spawn spoof spread spy stage start steal stop store stream submit "
    "subvert supply suppress surveil swap switch sync take tamper target terminate throttle "
    "trace track transfer transmit trap trigger tunnel turn uninstall unlock unpack update "
    "upload use validate verify view wipe withdraw write";

}  // namespace

std::set<std::string> load_verb_lexicon(const std::filesystem::path& path) {
  return parse_verb_lines(read_file(path));
}

const std::set<std::string>& default_verb_lexicon() {
  static const std::set<std::string> lexicon = [] {
    std::set<std::string> out;
    for (const std::string& w : split_whitespace(kBuiltinVerbs)) out.insert(w);
    return out;
  }();
  return lexicon;
}

namespace {

// Inflection variants tried against the lexicon, cheapest reasonable
// stemming for regular English verbs.
std::vector<std::string> verb_candidates(const std::string& w) {
  std::vector<std::string> out = {w};
  std::size_t n = w.size();
  if (n > 4 && w.compare(n - 3, 3, "ing") == 0) {
    out.push_back(w.substr(0, n - 3));
    out.push_back(w.substr(0, n - 3) + "e");
    if (n > 5 && w[n - 4] == w[n - 5]) out.push_back(w.substr(0, n - 4));  // "dropping"
  }
  if (n > 3 && w.compare(n - 2, 2, "ed") == 0) {
    out.push_back(w.substr(0, n - 2));
    out.push_back(w.substr(0, n - 2) + "e");
    if (n > 4 && w[n - 3] == w[n - 4]) out.push_back(w.substr(0, n - 3));  // "dropped"
  }
  if (n > 4 && w.compare(n - 3, 3, "ies") == 0) out.push_back(w.substr(0, n - 3) + "y");
  if (n > 2 && w.back() == 's' && w[n - 2] != 's') out.push_back(w.substr(0, n - 1));
  return out;
}

std::string strip_token_punct(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !is_ascii_alnum(token[b])) ++b;
  while (e > b && !is_ascii_alnum(token[e - 1])) --e;
  return std::string(token.substr(b, e - b));
}

}  // namespace

std::vector<AttackPhrase> filter_invalid_phrases(const std::vector<AttackPhrase>& phrases,
                                                 const std::set<std::string>& lexicon) {
  std::vector<AttackPhrase> out;
  for (const AttackPhrase& p : phrases) {
    bool has_verb = false;
    for (const std::string& token : split_whitespace(p.text)) {
      std::string w = to_lower(strip_token_punct(token));
      if (w.empty()) continue;
      for (const std::string& candidate : verb_candidates(w)) {
        if (lexicon.count(candidate)) {
          has_verb = true;
          break;
        }
      }
      if (has_verb) break;
    }
    if (has_verb) out.push_back(p);
  }
  return out;
}

std::string format_relation_input(std::string_view sentence, CharSpan e1, CharSpan e2) {
  auto check = [&](CharSpan s, const char* which) {
    if (s.end <= s.begin) throw ContractError(std::string(which) + " span is empty");
    if (s.end > sentence.size()) throw ContractError(std::string(which) + " span out of bounds");
  };
  check(e1, "e1");
  check(e2, "e2");
  if (e1.begin < e2.end && e2.begin < e1.end) throw ContractError("entity spans overlap");

  struct Marker {
    std::size_t pos;
    const char* text;
    int order;  // close markers sort before open markers at the same offset
  };
  std::vector<Marker> markers = {
      {e1.begin, "<e1> ", 1}, {e1.end, " </e1>", 0}, {e2.begin, "<e2> ", 1}, {e2.end, " </e2>", 0}};
  std::sort(markers.begin(), markers.end(), [](const Marker& a, const Marker& b) {
    if (a.pos != b.pos) return a.pos < b.pos;
    return a.order < b.order;
  });

  std::string built = "[CLS] ";
  std::size_t cursor = 0;
  for (const Marker& m : markers) {
    built.append(sentence.substr(cursor, m.pos - cursor));
    built.append(m.text);
    cursor = m.pos;
  }
  built.append(sentence.substr(cursor));

  // Inserting markers next to existing spaces can double them up.
  std::string out;
  out.reserve(built.size());
  for (char c : built) {
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out += c;
  }
  return trim(out);
}

ExtractionScore score_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  ExtractionScore s;
  s.true_positives = tp;
  s.false_positives = fp;
  s.false_negatives = fn;
  if (tp + fp > 0) s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (s.precision + s.recall > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

ExtractionScore score_extraction(const std::set<std::string>& predicted,
                                 const std::set<std::string>& gold) {
  std::size_t tp = 0;
  for (const std::string& p : predicted) tp += gold.count(p);
  return score_from_counts(tp, predicted.size() - tp, gold.size() - tp);
}

}  // namespace ladder
