#include "ladder/html.hpp"

#include <cstdint>
#include <set>
#include <string>

#include "ladder/text.hpp"

namespace ladder {

namespace {

const std::set<std::string>& dropped_subtrees() {
  static const std::set<std::string> s = {"script", "style", "head", "template", "noscript"};
  return s;
}

const std::set<std::string>& block_tags() {
  static const std::set<std::string> s = {
      "p",       "div",    "br",     "li",      "ul",   "ol",         "h1",   "h2",
      "h3",      "h4",     "h5",     "h6",      "tr",   "table",      "hr",   "pre",
      "section", "article", "header", "footer", "nav",  "aside",      "main", "form",
      "blockquote", "figure", "figcaption", "dl", "dt", "dd",         "address"};
  return s;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x110000) {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Decodes the reference starting at s[i] ('&'). Returns chars consumed, or 0
// if it is not a recognized reference (caller then keeps the literal '&').
std::size_t decode_entity(std::string_view s, std::size_t i, std::string& out) {
  std::size_t semi = s.find(';', i + 1);
  if (semi == std::string_view::npos || semi - i > 12) return 0;
  std::string_view body = s.substr(i + 1, semi - i - 1);
  if (body == "amp") {
    out += '&';
  } else if (body == "lt") {
    out += '<';
  } else if (body == "gt") {
    out += '>';
  } else if (body == "quot") {
    out += '"';
  } else if (body == "apos") {
    out += '\'';
  } else if (body == "nbsp") {
    out += ' ';
  } else if (body.size() > 1 && body[0] == '#') {
    std::uint32_t cp = 0;
    bool ok = false;
    if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
      for (char c : body.substr(2)) {
        if (!is_hex_digit(c)) return 0;
        std::uint32_t d = is_ascii_digit(c) ? static_cast<std::uint32_t>(c - '0')
                                            : static_cast<std::uint32_t>((c | 0x20) - 'a' + 10);
        cp = cp * 16 + d;
        if (cp > 0x10FFFF) return 0;
        ok = true;
      }
    } else {
      for (char c : body.substr(1)) {
        if (!is_ascii_digit(c)) return 0;
        cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
        if (cp > 0x10FFFF) return 0;
        ok = true;
      }
    }
    if (!ok) return 0;
    append_utf8(out, cp);
  } else {
    return 0;
  }
  return semi - i + 1;
}

// Lowercased element name starting at s[i] (just past '<' or '</').
std::string tag_name_at(std::string_view s, std::size_t i) {
  std::string name;
  while (i < s.size() && (is_ascii_alnum(s[i]) || s[i] == '-')) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    name += c;
    ++i;
  }
  return name;
}

// Index one past the closing '>' of the tag starting at s[i] ('<'),
// honoring quoted attribute values.
std::size_t skip_tag(std::string_view s, std::size_t i) {
  char quote = 0;
  for (std::size_t j = i + 1; j < s.size(); ++j) {
    char c = s[j];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return j + 1;
    }
  }
  return s.size();
}

std::string normalize_whitespace(std::string_view raw) {
  std::string out;
  std::string line;
  auto flush = [&]() {
    std::string t = trim(line);
    if (!t.empty()) {
      if (!out.empty()) out += '\n';
      out += t;
    }
    line.clear();
  };
  for (char c : raw) {
    if (c == '\n') {
      flush();
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      if (!line.empty() && line.back() != ' ') line += ' ';
    } else {
      line += c;
    }
  }
  flush();
  return out;
}

}  // namespace

std::string clean_html(std::string_view raw) {
  std::string text;
  text.reserve(raw.size());
  std::size_t i = 0;
  const std::size_t n = raw.size();
  while (i < n) {
    char c = raw[i];
    if (c == '<') {
      if (raw.substr(i, 4) == "<!--") {
        std::size_t end = raw.find("-->", i + 4);
        i = end == std::string_view::npos ? n : end + 3;
        continue;
      }
      if (i + 1 < n && (raw[i + 1] == '!' || raw[i + 1] == '?')) {
        i = skip_tag(raw, i);
        continue;
      }
      bool closing = i + 1 < n && raw[i + 1] == '/';
      std::string name = tag_name_at(raw, i + (closing ? 2 : 1));
      if (name.empty()) {
        // Stray '<' in prose; keep it.
        text += c;
        ++i;
        continue;
      }
      std::size_t after = skip_tag(raw, i);
      if (!closing && dropped_subtrees().count(name)) {
        // Skip the whole subtree, scanning for the matching close tag.
        std::string close = "</" + name;
        std::size_t j = after;
        while (j < n) {
          std::size_t pos = raw.find('<', j);
          if (pos == std::string_view::npos) {
            j = n;
            break;
          }
          if (pos + close.size() <= n && to_lower(raw.substr(pos, close.size())) == close) {
            j = skip_tag(raw, pos);
            break;
          }
          j = pos + 1;
        }
        i = j;
        continue;
      }
      if (block_tags().count(name)) {
        text += '\n';
      } else if (name == "td" || name == "th") {
        text += ' ';
      }
      i = after;
      continue;
    }
    if (c == '&') {
      std::size_t used = decode_entity(raw, i, text);
      if (used > 0) {
        i += used;
        continue;
      }
    }
    text += c;
    ++i;
  }
  return normalize_whitespace(text);
}

}  // namespace ladder
