#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ladder {

// The twelve node classes of the threat knowledge graph.
enum class EntityClass : std::uint8_t {
  Malware,
  MalwareType,
  Application,
  OS,
  Organization,
  Person,
  Time,
  ThreatActor,
  Location,
  AttackPattern,
  Indicator,
  Vulnerability,
};
inline constexpr int kEntityClassCount = 12;

// The eleven edge labels. NoRelation is a classifier outcome only and is
// never stored in a graph.
enum class RelationType : std::uint8_t {
  IsA,
  Targets,
  Uses,
  HasAuthor,
  HasAlias,
  Indicates,
  DiscoveredIn,
  Exploits,
  VariantOf,
  Has,
  NoRelation,
};
inline constexpr int kRelationTypeCount = 11;

const std::string& to_string(EntityClass c);
const std::string& to_string(RelationType r);

// Name lookup is exact on the canonical spelling plus a few common
// annotation-tool variants (e.g. "Attack_Pattern", "OperatingSystem").
std::optional<EntityClass> entity_class_from(std::string_view name);
std::optional<RelationType> relation_from(std::string_view name);

std::vector<EntityClass> all_entity_classes();
std::vector<RelationType> all_relation_types();

using EntityId = std::int64_t;
inline constexpr EntityId kNoEntity = -1;

struct Entity {
  EntityId id = kNoEntity;
  std::string canonical_name;  // first spelling seen
  EntityClass entity_class = EntityClass::Malware;
  std::set<std::string> surface_forms;  // includes canonical_name
  std::int64_t mention_count = 0;
};

struct Triple {
  EntityId head = kNoEntity;
  RelationType relation = RelationType::NoRelation;
  EntityId tail = kNoEntity;
  std::set<std::string> provenance;  // document ids, may be empty
  std::optional<double> confidence;  // set only for predicted triples

  friend bool operator==(const Triple& a, const Triple& b) {
    return a.head == b.head && a.relation == b.relation && a.tail == b.tail;
  }
  friend bool operator<(const Triple& a, const Triple& b) {
    if (a.head != b.head) return a.head < b.head;
    if (a.relation != b.relation) return a.relation < b.relation;
    return a.tail < b.tail;
  }
};

// Interning table for entities. Identity is the (name, class) pair, exact
// and case-sensitive; ids are dense and assigned in first-seen order.
class EntityStore {
 public:
  // Returns the existing id or creates a new entity. Records the spelling as
  // a surface form; does not touch mention_count.
  EntityId intern(std::string_view name, EntityClass cls);

  std::optional<EntityId> find(std::string_view name, EntityClass cls) const;

  const Entity& get(EntityId id) const;  // throws ContractError if absent
  Entity& get_mutable(EntityId id);

  bool contains(EntityId id) const;
  std::size_t size() const { return entities_.size(); }

  const std::vector<Entity>& entities() const { return entities_; }

 private:
  std::vector<Entity> entities_;
  std::map<std::pair<std::string, EntityClass>, EntityId> index_;
};

// Which relations may hold between a head class and a tail class.
// An absent pair means no relation is plausible in that direction.
class PlausibilityTable {
 public:
  // The table the toolkit ships with; see data/plausibility_rules.tsv for
  // the same content in reviewable form.
  static const PlausibilityTable& builtin();

  // Reads the TSV form: head_class <TAB> tail_class <TAB> comma-joined
  // relations. '#' comments and blank lines are skipped.
  static PlausibilityTable from_file(const std::filesystem::path& path);
  static PlausibilityTable parse(std::string_view tsv);

  std::string serialize() const;

  const std::set<RelationType>& relations(EntityClass head, EntityClass tail) const;
  bool plausible(EntityClass head, RelationType r, EntityClass tail) const;

  // Tail classes reachable from `head` via `r`.
  std::set<EntityClass> tail_classes(EntityClass head, RelationType r) const;

  friend bool operator==(const PlausibilityTable& a, const PlausibilityTable& b) {
    return a.rules_ == b.rules_;
  }

 private:
  std::map<std::pair<EntityClass, EntityClass>, std::set<RelationType>> rules_;
};

// Convenience over the builtin table.
std::set<RelationType> plausible_relations(EntityClass head, EntityClass tail);

enum class TripleViolation {
  None,
  DanglingHead,      // head id not present in the store
  DanglingTail,      // tail id not present in the store
  SelfReference,     // head == tail
  StoredNoRelation,  // NoRelation may not be materialized
  Implausible,       // relation not allowed for the endpoint classes
};

struct ValidationResult {
  TripleViolation violation = TripleViolation::None;
  std::string detail;
  bool ok() const { return violation == TripleViolation::None; }
};

ValidationResult validate_triple(const Triple& t, const EntityStore& store,
                                 const PlausibilityTable& table = PlausibilityTable::builtin());

// hasAlias is symmetric; the stored orientation is smaller-id first.
// Requires relation == HasAlias. Idempotent.
Triple normalize_alias(const Triple& t);

}  // namespace ladder
