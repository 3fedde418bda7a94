#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ladder/ontology.hpp"

namespace ladder {

enum class Direction : std::uint8_t { Outgoing, Incoming };

// One edge as seen from a specific node: the relation, which side of it the
// node is on, and who is at the other end.
struct NeighborhoodItem {
  RelationType relation = RelationType::NoRelation;
  Direction direction = Direction::Outgoing;
  EntityId neighbor = kNoEntity;

  friend bool operator==(const NeighborhoodItem&, const NeighborhoodItem&) = default;
  friend bool operator<(const NeighborhoodItem& a, const NeighborhoodItem& b) {
    if (a.relation != b.relation) return a.relation < b.relation;
    if (a.direction != b.direction) return a.direction < b.direction;
    return a.neighbor < b.neighbor;
  }
};

using NeighborhoodSet = std::set<NeighborhoodItem>;

// |a intersect b| / |a union b|; 1.0 when both sets are empty (two isolated
// nodes are trivially alike).
double jaccard_similarity(const NeighborhoodSet& a, const NeighborhoodSet& b);

struct BuildOptions {
  // Post-construction cleanup: drop Malware and ThreatActor entities that
  // are mentioned only once in the corpus or whose surface form also occurs
  // under another class, along with their triples. Mirrors the manual
  // pruning a curator would do on noisy extractor output.
  bool cleanup = true;
  const PlausibilityTable* table = nullptr;  // nullptr = builtin
};

struct BuildAudit {
  struct RemovedEntity {
    EntityId id = kNoEntity;
    std::string name;
    EntityClass entity_class = EntityClass::Malware;
    std::string reason;
  };
  std::vector<RemovedEntity> removed_entities;
  struct RejectedTriple {
    Triple triple;
    std::string reason;
  };
  std::vector<RejectedTriple> rejected_triples;
  std::size_t duplicates_merged = 0;
};

class KnowledgeGraph {
 public:
  // Validates, normalizes hasAlias orientation, deduplicates (merging
  // provenance), optionally cleans up, then indexes. Input triples that fail
  // validation land in the audit, not in the graph. Entities with no
  // surviving triple are kept (isolated nodes are legal).
  static KnowledgeGraph build(EntityStore entities, std::vector<Triple> triples,
                              const BuildOptions& options = {});

  const EntityStore& entities() const { return store_; }
  const std::vector<Triple>& triples() const { return triples_; }
  const BuildAudit& audit() const { return audit_; }

  // All edges touching the entity. Throws ContractError on unknown id.
  NeighborhoodSet neighborhood(EntityId id) const;

  // Tails of ⟨head, r, ?⟩. For hasAlias this is the full equivalence class
  // of the head (aliases are symmetric and transitive), minus the head.
  std::set<EntityId> query_tails(EntityId head, RelationType r) const;

  // Heads of ⟨?, r, tail⟩.
  std::set<EntityId> query_heads(RelationType r, EntityId tail) const;

  // Alias equivalence class including the entity itself.
  std::set<EntityId> alias_class(EntityId id) const;

  // Internal index vs triple list agreement plus stored-triple validity;
  // cheap enough to run in tests after every mutation-producing operation.
  bool audit_consistency() const;

  // Directory layout: entities.json + triples.tsv.
  void save(const std::filesystem::path& dir) const;
  static KnowledgeGraph load(const std::filesystem::path& dir);

 private:
  EntityStore store_;
  std::vector<Triple> triples_;
  BuildAudit audit_;
  std::map<EntityId, std::vector<std::size_t>> by_head_;
  std::map<EntityId, std::vector<std::size_t>> by_tail_;
  std::vector<EntityId> alias_root_;  // union-find over hasAlias, path-compressed at build

  void index();
  EntityId alias_find(EntityId id) const;
};

struct SimilarityOptions {
  std::size_t k = 10;
  // Compare edges ignoring which side the entity is on.
  bool direction_agnostic = false;
};

struct SimilarityHit {
  EntityId entity = kNoEntity;
  double score = 0.0;
};

// Top-k entities of the same class as `query`, ranked by Jaccard similarity
// of neighborhoods (descending), ties by ascending entity id. The query
// itself is excluded. For ThreatActor queries, each actor's neighborhood is
// augmented with the neighborhoods of the malware it authored, since actors
// are mostly described through their tooling.
std::vector<SimilarityHit> most_similar(const KnowledgeGraph& graph, EntityId query,
                                        const SimilarityOptions& options = {});

// One entity mention inside a document, by text offset.
struct Mention {
  EntityId entity = kNoEntity;
  std::size_t offset = 0;
};

// The document's subject: the most-mentioned entity among `mentions`
// restricted to the given class; ties go to the earliest first mention.
std::optional<EntityId> primary_entity(std::span<const Mention> mentions,
                                       const EntityStore& store, EntityClass cls);

}  // namespace ladder
