#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ladder/embedding.hpp"

namespace ladder {

enum class Platform { Mobile, Enterprise };

const std::string& to_string(Platform p);

// One ATT&CK-style technique entry.
struct Technique {
  std::string id;    // "T" followed by four digits
  std::string name;
  std::string description;
  Platform platform = Platform::Mobile;
  std::vector<std::string> tactics;  // kill-chain phase names
};

// Loads a JSON catalog: [{"id": "...", "name": "...", "description": "...",
// "platform": "mobile"|"enterprise", "tactics": [...]}, ...]. Entries are
// returned sorted by id. Throws ParseError on malformed ids, duplicates,
// or empty name/description.
std::vector<Technique> load_catalog(const std::filesystem::path& path);
std::vector<Technique> parse_catalog(std::string_view json_text);

// Title and description vectors for one technique, same provider.
struct TechniqueEmbedding {
  std::string technique_id;
  EmbeddingVector title;
  EmbeddingVector description;
};

std::vector<TechniqueEmbedding> embed_catalog(const std::vector<Technique>& catalog,
                                              const EmbeddingProvider& provider);

}  // namespace ladder
