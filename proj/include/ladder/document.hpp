#pragma once

#include <optional>
#include <string>

namespace ladder {

// One ingested report after HTML cleanup.
struct Document {
  std::string id;    // stable key, e.g. the source url or file stem
  std::string text;  // cleaned plain text, lines joined by '\n'
  std::optional<std::string> url;
  std::optional<int> year;  // publication year when one was extracted
};

}  // namespace ladder
