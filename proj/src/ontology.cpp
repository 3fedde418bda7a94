#include "ladder/ontology.hpp"

#include <array>
#include <sstream>
#include <utility>

#include "ladder/errors.hpp"
#include "ladder/text.hpp"

namespace ladder {

namespace {

const std::array<std::string, kEntityClassCount> kEntityClassNames = {
    "Malware",  "MalwareType", "Application", "OS",            "Organization", "Person",
    "Time",     "ThreatActor", "Location",    "AttackPattern", "Indicator",    "Vulnerability",
};

const std::array<std::string, kRelationTypeCount> kRelationNames = {
    "isA",       "targets",      "uses",     "hasAuthor", "hasAlias", "indicates",
    "discoveredIn", "exploits", "variantOf", "has",       "noRelation",
};

}  // namespace

const std::string& to_string(EntityClass c) {
  return kEntityClassNames[static_cast<std::size_t>(c)];
}

const std::string& to_string(RelationType r) {
  return kRelationNames[static_cast<std::size_t>(r)];
}

std::optional<EntityClass> entity_class_from(std::string_view name) {
  for (int i = 0; i < kEntityClassCount; ++i) {
    if (kEntityClassNames[static_cast<std::size_t>(i)] == name)
      return static_cast<EntityClass>(i);
  }
  // Variants seen in annotation exports.
  if (name == "Attack_Pattern" || name == "Attack-Pattern") return EntityClass::AttackPattern;
  if (name == "OperatingSystem" || name == "Operating_System") return EntityClass::OS;
  if (name == "Threat_Actor") return EntityClass::ThreatActor;
  if (name == "Malware_Type") return EntityClass::MalwareType;
  return std::nullopt;
}

std::optional<RelationType> relation_from(std::string_view name) {
  for (int i = 0; i < kRelationTypeCount; ++i) {
    if (kRelationNames[static_cast<std::size_t>(i)] == name)
      return static_cast<RelationType>(i);
  }
  return std::nullopt;
}

std::vector<EntityClass> all_entity_classes() {
  std::vector<EntityClass> out;
  for (int i = 0; i < kEntityClassCount; ++i) out.push_back(static_cast<EntityClass>(i));
  return out;
}

std::vector<RelationType> all_relation_types() {
  std::vector<RelationType> out;
  for (int i = 0; i < kRelationTypeCount; ++i) out.push_back(static_cast<RelationType>(i));
  return out;
}

EntityId EntityStore::intern(std::string_view name, EntityClass cls) {
  if (name.empty()) throw ContractError("entity name must be non-empty");
  auto key = std::make_pair(std::string(name), cls);
  auto it = index_.find(key);
  if (it != index_.end()) {
    entities_[static_cast<std::size_t>(it->second)].surface_forms.insert(key.first);
    return it->second;
  }
  EntityId id = static_cast<EntityId>(entities_.size());
  Entity e;
  e.id = id;
  e.canonical_name = key.first;
  e.entity_class = cls;
  e.surface_forms.insert(key.first);
  entities_.push_back(std::move(e));
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<EntityId> EntityStore::find(std::string_view name, EntityClass cls) const {
  auto it = index_.find(std::make_pair(std::string(name), cls));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Entity& EntityStore::get(EntityId id) const {
  if (!contains(id)) throw ContractError("unknown entity id " + std::to_string(id));
  return entities_[static_cast<std::size_t>(id)];
}

Entity& EntityStore::get_mutable(EntityId id) {
  if (!contains(id)) throw ContractError("unknown entity id " + std::to_string(id));
  return entities_[static_cast<std::size_t>(id)];
}

bool EntityStore::contains(EntityId id) const {
  return id >= 0 && static_cast<std::size_t>(id) < entities_.size();
}

namespace {

PlausibilityTable make_builtin() {
  // Kept byte-for-byte in sync with data/plausibility_rules.tsv; a unit test
  // compares the two.
  const char* tsv =
      "Indicator\tMalware\tindicates\n"
      "Malware\tApplication\ttargets,uses,has\n"
      "Malware\tAttackPattern\tuses\n"
      "Malware\tLocation\ttargets,has\n"
      "Malware\tMalware\tvariantOf,hasAlias,has\n"
      "Malware\tMalwareType\tisA\n"
      "Malware\tOS\ttargets,has\n"
      "Malware\tOrganization\ttargets,has\n"
      "Malware\tPerson\thasAuthor,targets,has\n"
      "Malware\tThreatActor\thasAuthor\n"
      "Malware\tTime\tdiscoveredIn\n"
      "Malware\tVulnerability\texploits\n"
      "ThreatActor\tThreatActor\thasAlias\n";
  return PlausibilityTable::parse(tsv);
}

}  // namespace

const PlausibilityTable& PlausibilityTable::builtin() {
  static const PlausibilityTable table = make_builtin();
  return table;
}

PlausibilityTable PlausibilityTable::from_file(const std::filesystem::path& path) {
  return parse(read_file(path));
}

PlausibilityTable PlausibilityTable::parse(std::string_view tsv) {
  PlausibilityTable out;
  std::size_t line_no = 0;
  for (const std::string& raw : split(tsv, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError("expected 3 tab-separated fields", line_no);
    auto head = entity_class_from(trim(fields[0]));
    auto tail = entity_class_from(trim(fields[1]));
    if (!head) throw ParseError("unknown entity class '" + fields[0] + "'", line_no);
    if (!tail) throw ParseError("unknown entity class '" + fields[1] + "'", line_no);
    std::set<RelationType>& rels = out.rules_[{*head, *tail}];
    for (const std::string& name : split(fields[2], ',')) {
      auto r = relation_from(trim(name));
      if (!r) throw ParseError("unknown relation '" + name + "'", line_no);
      if (*r == RelationType::NoRelation)
        throw ParseError("noRelation cannot appear in a plausibility rule", line_no);
      rels.insert(*r);
    }
    if (rels.empty()) throw ParseError("empty relation list", line_no);
  }
  return out;
}

std::string PlausibilityTable::serialize() const {
  std::ostringstream out;
  for (const auto& [key, rels] : rules_) {
    out << to_string(key.first) << '\t' << to_string(key.second) << '\t';
    bool first = true;
    for (RelationType r : rels) {
      if (!first) out << ',';
      out << to_string(r);
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

const std::set<RelationType>& PlausibilityTable::relations(EntityClass head,
                                                           EntityClass tail) const {
  static const std::set<RelationType> empty;
  auto it = rules_.find({head, tail});
  return it == rules_.end() ? empty : it->second;
}

bool PlausibilityTable::plausible(EntityClass head, RelationType r, EntityClass tail) const {
  return relations(head, tail).count(r) > 0;
}

std::set<EntityClass> PlausibilityTable::tail_classes(EntityClass head, RelationType r) const {
  std::set<EntityClass> out;
  for (const auto& [key, rels] : rules_) {
    if (key.first == head && rels.count(r)) out.insert(key.second);
  }
  return out;
}

std::set<RelationType> plausible_relations(EntityClass head, EntityClass tail) {
  return PlausibilityTable::builtin().relations(head, tail);
}

ValidationResult validate_triple(const Triple& t, const EntityStore& store,
                                 const PlausibilityTable& table) {
  if (!store.contains(t.head))
    return {TripleViolation::DanglingHead, "head id " + std::to_string(t.head) + " not in store"};
  if (!store.contains(t.tail))
    return {TripleViolation::DanglingTail, "tail id " + std::to_string(t.tail) + " not in store"};
  if (t.head == t.tail)
    return {TripleViolation::SelfReference,
            "head and tail are both '" + store.get(t.head).canonical_name + "'"};
  if (t.relation == RelationType::NoRelation)
    return {TripleViolation::StoredNoRelation, "noRelation cannot be stored"};
  const Entity& h = store.get(t.head);
  const Entity& tl = store.get(t.tail);
  if (!table.plausible(h.entity_class, t.relation, tl.entity_class))
    return {TripleViolation::Implausible,
            to_string(t.relation) + " not plausible for (" + to_string(h.entity_class) + ", " +
                to_string(tl.entity_class) + ")"};
  return {};
}

Triple normalize_alias(const Triple& t) {
  if (t.relation != RelationType::HasAlias)
    throw ContractError("normalize_alias requires a hasAlias triple");
  if (t.head <= t.tail) return t;
  Triple out = t;
  std::swap(out.head, out.tail);
  return out;
}

}  // namespace ladder
