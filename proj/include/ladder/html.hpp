#pragma once

#include <string>
#include <string_view>

namespace ladder {

// Strips an HTML page down to readable plain text.
//
// Rules, in order of application:
//   - <script>, <style>, <head>, <template>, <noscript> subtrees are dropped;
//   - comments and all remaining tags are removed; block-level tags act as
//     line breaks, inline tags as nothing;
//   - character references are decoded (named: amp lt gt quot apos nbsp;
//     numeric: decimal and hex);
//   - horizontal whitespace collapses to single spaces, lines are trimmed,
//     and empty lines are dropped.
//
// The result is trimmed lines joined by '\n'. Plain text input passes
// through with only the whitespace normalization applied. Works on tag soup;
// never throws on malformed markup.
std::string clean_html(std::string_view raw);

}  // namespace ladder
