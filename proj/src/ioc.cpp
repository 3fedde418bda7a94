#include "ladder/ioc.hpp"

#include <algorithm>
#include <array>
#include <regex>

#include "ladder/text.hpp"

namespace ladder {

namespace {

const std::array<std::string, 6> kIocNames = {"SHA256", "SHA1", "CVE", "IPv4", "Email", "FilePath"};

struct Candidate {
  std::size_t begin;
  std::size_t end;
  IocType type;
};

// Lower value wins when spans overlap.
int priority(IocType t) { return static_cast<int>(t); }

bool hex_at(std::string_view s, std::size_t idx) {
  return idx < s.size() && is_hex_digit(s[idx]);
}

bool digit_or_dot_at(std::string_view s, std::size_t idx) {
  return idx < s.size() && (is_ascii_digit(s[idx]) || s[idx] == '.');
}

void collect(std::string_view text, const std::regex& re, IocType type,
             bool (*reject_before)(std::string_view, std::size_t),
             bool (*reject_after)(std::string_view, std::size_t), std::vector<Candidate>& out) {
  auto begin = std::cregex_iterator(text.data(), text.data() + text.size(), re);
  for (auto it = begin; it != std::cregex_iterator(); ++it) {
    std::size_t b = static_cast<std::size_t>(it->position(0));
    std::size_t e = b + static_cast<std::size_t>(it->length(0));
    if (reject_before && b > 0 && reject_before(text, b - 1)) continue;
    if (reject_after && reject_after(text, e)) continue;
    out.push_back({b, e, type});
  }
}

bool alnum_at(std::string_view s, std::size_t idx) {
  return idx < s.size() && is_ascii_alnum(s[idx]);
}

bool digit_at(std::string_view s, std::size_t idx) {
  return idx < s.size() && is_ascii_digit(s[idx]);
}

bool email_char_before(std::string_view s, std::size_t idx) {
  if (idx >= s.size()) return false;
  char c = s[idx];
  return is_ascii_alnum(c) || c == '.' || c == '_' || c == '-' || c == '@';
}

bool path_char_before(std::string_view s, std::size_t idx) {
  return idx < s.size() && is_ascii_alnum(s[idx]);
}

}  // namespace

const std::string& to_string(IocType t) { return kIocNames[static_cast<std::size_t>(t)]; }

std::vector<IocHit> extract_iocs(std::string_view text) {
  // Hash digests match in a single case register: all-lowercase or
  // all-uppercase hex, not mixed.
  static const std::regex sha256_re("[a-f0-9]{64}|[A-F0-9]{64}");
  static const std::regex sha1_re("[a-f0-9]{40}|[A-F0-9]{40}");
  static const std::regex cve_re("CVE-[0-9]{4}-[0-9]{4,6}");
  static const std::regex ipv4_re(
      "(25[0-5]|2[0-4][0-9]|1[0-9][0-9]|[1-9]?[0-9])"
      "(\\.(25[0-5]|2[0-4][0-9]|1[0-9][0-9]|[1-9]?[0-9])){3}");
  static const std::regex email_re(
      "[a-z][a-z0-9._-]+@[a-z0-9-]+(\\.[a-z0-9-]+)*\\.[a-z]{2,}");
  // Windows drive paths and absolute POSIX paths with conservative
  // component characters; a path never ends in a separator or a stray dot.
  static const std::regex path_re(
      "[a-zA-Z]:\\\\[0-9a-zA-Z._\\\\-]*[0-9a-zA-Z]|(/[0-9a-zA-Z._-]*[0-9a-zA-Z])+");

  std::vector<Candidate> candidates;
  collect(text, sha256_re, IocType::Sha256, hex_at, hex_at, candidates);
  collect(text, sha1_re, IocType::Sha1, hex_at, hex_at, candidates);
  collect(text, cve_re, IocType::Cve, alnum_at, digit_at, candidates);
  collect(text, ipv4_re, IocType::Ipv4, digit_or_dot_at, digit_or_dot_at, candidates);
  collect(text, email_re, IocType::Email, email_char_before, nullptr, candidates);
  collect(text, path_re, IocType::FilePath, path_char_before, nullptr, candidates);

  // Precedence, then longer match, then leftmost; greedy selection of
  // non-overlapping spans.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (priority(a.type) != priority(b.type)) return priority(a.type) < priority(b.type);
    std::size_t la = a.end - a.begin, lb = b.end - b.begin;
    if (la != lb) return la > lb;
    return a.begin < b.begin;
  });
  std::vector<Candidate> kept;
  for (const Candidate& c : candidates) {
    bool overlaps = false;
    for (const Candidate& k : kept) {
      if (c.begin < k.end && k.begin < c.end) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) { return a.begin < b.begin; });

  std::vector<IocHit> hits;
  hits.reserve(kept.size());
  for (const Candidate& c : kept) {
    hits.push_back({c.begin, c.end, c.type, std::string(text.substr(c.begin, c.end - c.begin))});
  }
  return hits;
}

}  // namespace ladder
