#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "ladder/ontology.hpp"

namespace ladder {

// Per-line rejection record; accepted lines never appear here.
struct TripleRejection {
  std::size_t line = 0;  // 1-based
  std::string content;
  std::string reason;
};

struct ParsedTriples {
  EntityStore entities;
  std::vector<Triple> triples;  // deduplicated, input order of first sighting
  std::vector<TripleRejection> rejections;
  std::size_t duplicates_merged = 0;  // accepted lines folded into an earlier triple
};

// Reads tab-separated triples, one per line:
//
//   head_name <TAB> head_class <TAB> relation <TAB> tail_name <TAB> tail_class [<TAB> doc_ids]
//
// Blank lines and '#' comments are skipped. A line that fails to parse or
// that violates the plausibility table is recorded as a rejection and
// otherwise ignored; parsing always consumes the whole stream. Duplicate
// triples merge their provenance and are counted in duplicates_merged. The
// optional sixth column holds one or more comma-joined document ids. Each
// accepted line counts one mention for its head and tail entity.
ParsedTriples parse_triples(std::istream& in,
                            const PlausibilityTable& table = PlausibilityTable::builtin());

ParsedTriples parse_triples_text(std::string_view tsv,
                                 const PlausibilityTable& table = PlausibilityTable::builtin());

// Throws IoError when the file cannot be opened.
ParsedTriples parse_triples_file(const std::filesystem::path& path,
                                 const PlausibilityTable& table = PlausibilityTable::builtin());

// Inverse of parse_triples for accepted data; provenance doc ids are
// comma-joined into the optional sixth column.
void write_triples_tsv(std::ostream& out, const EntityStore& store,
                       const std::vector<Triple>& triples);

std::string triples_to_tsv(const EntityStore& store, const std::vector<Triple>& triples);

}  // namespace ladder
