#include "ladder/brat.hpp"

#include <map>
#include <sstream>

#include "ladder/errors.hpp"
#include "ladder/text.hpp"

namespace ladder {

namespace {

bool surface_matches(std::string_view from_text, std::string_view annotated) {
  if (from_text.size() != annotated.size()) return false;
  for (std::size_t i = 0; i < from_text.size(); ++i) {
    char a = from_text[i] == '\n' ? ' ' : from_text[i];
    char b = annotated[i] == '\n' ? ' ' : annotated[i];
    if (a != b) return false;
  }
  return true;
}

// "Arg1:T3" -> "T3"; the prefix must match exactly.
std::string arg_ref(const std::string& field, const char* prefix, std::size_t line_no) {
  if (field.rfind(prefix, 0) != 0)
    throw ParseError("expected '" + std::string(prefix) + "...' in relation, got '" + field + "'",
                     line_no);
  return field.substr(std::string(prefix).size());
}

}  // namespace

AnnotatedDocument parse_brat(const std::string& text, const std::string& annotations) {
  AnnotatedDocument out;
  out.document.text = text;

  std::map<std::string, std::size_t> span_index;  // tid -> entity_spans slot

  std::size_t line_no = 0;
  for (const std::string& raw : split(annotations, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty()) continue;
    char kind = line[0];
    if (kind == '#' || kind == 'A' || kind == 'M' || kind == 'N') continue;

    std::vector<std::string> cols = split(line, '\t');
    if (kind == 'T') {
      if (cols.size() < 3) throw ParseError("span line needs 3 tab-separated columns", line_no);
      std::vector<std::string> meta = split_whitespace(cols[1]);
      if (meta.size() != 3) {
        // "Class b1 e1;b2 e2" means a discontinuous span, which this toolkit
        // does not model.
        if (cols[1].find(';') != std::string::npos)
          throw ParseError("discontinuous spans are not supported", line_no);
        throw ParseError("span line needs 'Class begin end'", line_no);
      }
      auto cls = entity_class_from(meta[0]);
      if (!cls) throw ParseError("unknown entity class '" + meta[0] + "'", line_no);
      std::size_t begin, end;
      try {
        begin = std::stoull(meta[1]);
        end = std::stoull(meta[2]);
      } catch (const std::exception&) {
        throw ParseError("offsets must be non-negative integers", line_no);
      }
      if (end <= begin) throw ParseError("span end must exceed begin", line_no);
      if (end > text.size())
        throw ParseError("span [" + meta[1] + ", " + meta[2] + ") exceeds text length " +
                             std::to_string(text.size()),
                         line_no);
      std::string_view actual = std::string_view(text).substr(begin, end - begin);
      if (!surface_matches(actual, cols[2]))
        throw ParseError("span text mismatch: annotation says '" + cols[2] + "' but text has '" +
                             std::string(actual) + "'",
                         line_no);
      if (span_index.count(cols[0])) throw ParseError("duplicate span id " + cols[0], line_no);
      span_index[cols[0]] = out.entity_spans.size();
      if (*cls == EntityClass::AttackPattern)
        out.attack_pattern_spans.push_back(out.entity_spans.size());
      out.entity_spans.push_back({cols[0], *cls, begin, end, cols[2]});
    } else if (kind == 'R') {
      if (cols.size() < 2) throw ParseError("relation line needs 2 tab-separated columns", line_no);
      std::vector<std::string> meta = split_whitespace(cols[1]);
      if (meta.size() != 3) throw ParseError("relation line needs 'type Arg1:Tx Arg2:Ty'", line_no);
      auto rel = relation_from(meta[0]);
      if (!rel) throw ParseError("unknown relation '" + meta[0] + "'", line_no);
      std::string t1 = arg_ref(meta[1], "Arg1:", line_no);
      std::string t2 = arg_ref(meta[2], "Arg2:", line_no);
      auto i1 = span_index.find(t1);
      auto i2 = span_index.find(t2);
      if (i1 == span_index.end()) throw ParseError("relation references unknown span " + t1, line_no);
      if (i2 == span_index.end()) throw ParseError("relation references unknown span " + t2, line_no);
      out.relations.push_back({cols[0], *rel, i1->second, i2->second});
    } else {
      throw ParseError("unrecognized annotation line '" + line.substr(0, 16) + "...'", line_no);
    }
  }
  return out;
}

AnnotatedDocument parse_brat_files(const std::filesystem::path& txt_path,
                                   const std::filesystem::path& ann_path) {
  AnnotatedDocument doc = parse_brat(read_file(txt_path), read_file(ann_path));
  doc.document.id = txt_path.stem().string();
  return doc;
}

std::string to_brat(const AnnotatedDocument& doc) {
  std::ostringstream out;
  for (const EntitySpan& s : doc.entity_spans) {
    std::string surface = s.text;
    for (char& c : surface)
      if (c == '\n') c = ' ';
    out << s.tid << '\t' << to_string(s.entity_class) << ' ' << s.begin << ' ' << s.end << '\t'
        << surface << '\n';
  }
  for (const RelationAnnotation& r : doc.relations) {
    out << r.rid << '\t' << to_string(r.relation) << " Arg1:" << doc.entity_spans[r.arg1].tid
        << " Arg2:" << doc.entity_spans[r.arg2].tid << '\n';
  }
  return out.str();
}

}  // namespace ladder
