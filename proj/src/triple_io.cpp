#include "ladder/triple_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "ladder/errors.hpp"
#include "ladder/text.hpp"

namespace ladder {

namespace {

struct TripleKey {
  EntityId head;
  RelationType relation;
  EntityId tail;
  bool operator<(const TripleKey& o) const {
    if (head != o.head) return head < o.head;
    if (relation != o.relation) return relation < o.relation;
    return tail < o.tail;
  }
};

}  // namespace

ParsedTriples parse_triples(std::istream& in, const PlausibilityTable& table) {
  ParsedTriples out;
  std::map<TripleKey, std::size_t> seen;  // -> index into out.triples

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    auto reject = [&](const std::string& reason) {
      out.rejections.push_back({line_no, raw, reason});
    };

    std::vector<std::string> f = split(raw, '\t');
    if (f.size() != 5 && f.size() != 6) {
      reject("expected 5 or 6 tab-separated fields, got " + std::to_string(f.size()));
      continue;
    }
    std::string head_name = trim(f[0]);
    std::string tail_name = trim(f[3]);
    if (head_name.empty() || tail_name.empty()) {
      reject("empty entity name");
      continue;
    }
    auto head_cls = entity_class_from(trim(f[1]));
    if (!head_cls) {
      reject("unknown entity class '" + trim(f[1]) + "'");
      continue;
    }
    auto rel = relation_from(trim(f[2]));
    if (!rel) {
      reject("unknown relation '" + trim(f[2]) + "'");
      continue;
    }
    auto tail_cls = entity_class_from(trim(f[4]));
    if (!tail_cls) {
      reject("unknown entity class '" + trim(f[4]) + "'");
      continue;
    }
    if (*rel == RelationType::NoRelation) {
      reject("noRelation cannot be stored");
      continue;
    }
    if (head_name == tail_name && *head_cls == *tail_cls) {
      reject("self-reference");
      continue;
    }
    if (!table.plausible(*head_cls, *rel, *tail_cls)) {
      reject(to_string(*rel) + " not plausible for (" + to_string(*head_cls) + ", " +
             to_string(*tail_cls) + ")");
      continue;
    }

    EntityId h = out.entities.intern(head_name, *head_cls);
    EntityId t = out.entities.intern(tail_name, *tail_cls);
    out.entities.get_mutable(h).mention_count += 1;
    out.entities.get_mutable(t).mention_count += 1;

    std::set<std::string> doc_ids;
    if (f.size() == 6) {
      for (const std::string& doc : split(f[5], ',')) {
        std::string id = trim(doc);
        if (!id.empty()) doc_ids.insert(std::move(id));
      }
    }

    TripleKey key{h, *rel, t};
    auto it = seen.find(key);
    if (it != seen.end()) {
      out.triples[it->second].provenance.insert(doc_ids.begin(), doc_ids.end());
      out.duplicates_merged += 1;
      continue;
    }
    Triple triple;
    triple.head = h;
    triple.relation = *rel;
    triple.tail = t;
    triple.provenance = std::move(doc_ids);
    seen.emplace(key, out.triples.size());
    out.triples.push_back(std::move(triple));
  }
  return out;
}

ParsedTriples parse_triples_text(std::string_view tsv, const PlausibilityTable& table) {
  std::istringstream in{std::string(tsv)};
  return parse_triples(in, table);
}

ParsedTriples parse_triples_file(const std::filesystem::path& path,
                                 const PlausibilityTable& table) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return parse_triples(in, table);
}

void write_triples_tsv(std::ostream& out, const EntityStore& store,
                       const std::vector<Triple>& triples) {
  for (const Triple& t : triples) {
    const Entity& h = store.get(t.head);
    const Entity& tl = store.get(t.tail);
    out << h.canonical_name << '\t' << to_string(h.entity_class) << '\t' << to_string(t.relation)
        << '\t' << tl.canonical_name << '\t' << to_string(tl.entity_class);
    if (!t.provenance.empty()) {
      out << '\t';
      bool first = true;
      for (const std::string& doc : t.provenance) {
        if (!first) out << ',';
        out << doc;
        first = false;
      }
    }
    out << '\n';
  }
}

std::string triples_to_tsv(const EntityStore& store, const std::vector<Triple>& triples) {
  std::ostringstream out;
  write_triples_tsv(out, store, triples);
  return out.str();
}

}  // namespace ladder
