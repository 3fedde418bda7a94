#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ladder {

enum class IocType {
  Sha256,
  Sha1,
  Cve,
  Ipv4,
  Email,
  FilePath,
};

const std::string& to_string(IocType t);

struct IocHit {
  std::size_t begin = 0;  // byte offsets into the input, [begin, end)
  std::size_t end = 0;
  IocType type = IocType::Sha256;
  std::string text;

  friend bool operator==(const IocHit& a, const IocHit& b) {
    return a.begin == b.begin && a.end == b.end && a.type == b.type && a.text == b.text;
  }
};

// Scans plain text for indicators of compromise. Overlapping candidates are
// resolved by type precedence (SHA256 > SHA1 > CVE > IPv4 > Email > FilePath),
// then longer match, then leftmost. Hash matches must not touch adjacent hex
// characters, and IPv4 matches must not touch adjacent digits or dots, so a
// 64-char digest never also yields its 40-char prefix and "1.2.3.4.5" yields
// nothing. Hits come back in text order.
std::vector<IocHit> extract_iocs(std::string_view text);

}  // namespace ladder
