#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ladder/document.hpp"
#include "ladder/ontology.hpp"

namespace ladder {

// One T-line: a typed character span over the document text.
struct EntitySpan {
  std::string tid;   // annotation id, e.g. "T3"
  EntityClass entity_class = EntityClass::Malware;
  std::size_t begin = 0;  // byte offsets, [begin, end)
  std::size_t end = 0;
  std::string text;  // surface form as annotated

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

// One R-line: a typed edge between two spans, by index into entity_spans.
struct RelationAnnotation {
  std::string rid;  // annotation id, e.g. "R1"
  RelationType relation = RelationType::NoRelation;
  std::size_t arg1 = 0;
  std::size_t arg2 = 0;

  friend bool operator==(const RelationAnnotation&, const RelationAnnotation&) = default;
};

struct AnnotatedDocument {
  Document document;
  // All T-line spans, in file order. AttackPattern spans are included here;
  // attack_pattern_spans lists their indices, since attack patterns may
  // legally nest other entity spans inside them.
  std::vector<EntitySpan> entity_spans;
  std::vector<std::size_t> attack_pattern_spans;
  std::vector<RelationAnnotation> relations;
};

// Parses standoff annotations against their source text. Every span is
// checked against the text (newlines compare equal to spaces, matching how
// annotation tools render the surface column); a mismatched offset, an
// unknown entity class or relation, or a relation argument that names a
// missing span id raises ParseError with the offending line number.
// Note lines ('#') and attribute lines ('A', 'M', 'N') are skipped.
AnnotatedDocument parse_brat(const std::string& text, const std::string& annotations);

// Reads <stem>.txt and <stem>.ann; document id is the file stem.
AnnotatedDocument parse_brat_files(const std::filesystem::path& txt_path,
                                   const std::filesystem::path& ann_path);

// Serializes back to standoff form. parse_brat(text, to_brat(doc)) returns
// an equal structure.
std::string to_brat(const AnnotatedDocument& doc);

}  // namespace ladder
