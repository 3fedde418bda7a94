#include "ladder/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ladder/errors.hpp"
#include "ladder/text.hpp"
#include "ladder/triple_io.hpp"

namespace ladder {

double jaccard_similarity(const NeighborhoodSet& a, const NeighborhoodSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const NeighborhoodItem& item : a) inter += b.count(item);
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

bool cleanup_candidate(EntityClass cls) {
  // Extractors hallucinate malware and actor names far more than the other
  // classes, which mostly come from closed vocabularies.
  return cls == EntityClass::Malware || cls == EntityClass::ThreatActor;
}

}  // namespace

KnowledgeGraph KnowledgeGraph::build(EntityStore entities, std::vector<Triple> triples,
                                     const BuildOptions& options) {
  const PlausibilityTable& table = options.table ? *options.table : PlausibilityTable::builtin();

  KnowledgeGraph graph;

  // Validation and alias normalization first, so duplicates created by
  // flipping ⟨B, hasAlias, A⟩ onto ⟨A, hasAlias, B⟩ merge below.
  std::vector<Triple> accepted;
  for (Triple& t : triples) {
    ValidationResult v = validate_triple(t, entities, table);
    if (!v.ok()) {
      graph.audit_.rejected_triples.push_back({t, v.detail});
      continue;
    }
    if (t.relation == RelationType::HasAlias) t = normalize_alias(t);
    accepted.push_back(std::move(t));
  }

  std::map<Triple, std::size_t> seen;  // ordering ignores provenance
  std::vector<Triple> unique;
  for (Triple& t : accepted) {
    auto it = seen.find(t);
    if (it != seen.end()) {
      Triple& kept = unique[it->second];
      kept.provenance.insert(t.provenance.begin(), t.provenance.end());
      graph.audit_.duplicates_merged += 1;
      continue;
    }
    seen.emplace(t, unique.size());
    unique.push_back(std::move(t));
  }

  std::set<EntityId> removed;
  if (options.cleanup) {
    // Surface form -> set of classes it appears under, across all entities.
    std::map<std::string, std::set<EntityClass>> classes_of;
    for (const Entity& e : entities.entities()) {
      for (const std::string& s : e.surface_forms) classes_of[s].insert(e.entity_class);
    }
    for (const Entity& e : entities.entities()) {
      if (!cleanup_candidate(e.entity_class)) continue;
      std::string reason;
      if (e.mention_count <= 1) {
        reason = "mentioned at most once in the corpus";
      } else {
        for (const std::string& s : e.surface_forms) {
          if (classes_of[s].size() > 1) {
            reason = "surface form '" + s + "' also occurs under another class";
            break;
          }
        }
      }
      if (!reason.empty()) {
        removed.insert(e.id);
        graph.audit_.removed_entities.push_back({e.id, e.canonical_name, e.entity_class, reason});
      }
    }
  }

  // Rebuild the store densely over the survivors; ids change, names do not.
  std::map<EntityId, EntityId> remap;
  EntityStore compacted;
  for (const Entity& e : entities.entities()) {
    if (removed.count(e.id)) continue;
    EntityId id = compacted.intern(e.canonical_name, e.entity_class);
    Entity& fresh = compacted.get_mutable(id);
    fresh.surface_forms = e.surface_forms;
    fresh.mention_count = e.mention_count;
    remap[e.id] = id;
  }
  for (Triple& t : unique) {
    auto h = remap.find(t.head);
    auto tl = remap.find(t.tail);
    if (h == remap.end() || tl == remap.end()) {
      graph.audit_.rejected_triples.push_back({t, "endpoint removed by cleanup"});
      continue;
    }
    t.head = h->second;
    t.tail = tl->second;
    graph.triples_.push_back(std::move(t));
  }
  graph.store_ = std::move(compacted);
  graph.index();
  return graph;
}

void KnowledgeGraph::index() {
  by_head_.clear();
  by_tail_.clear();
  alias_root_.assign(store_.size(), kNoEntity);
  for (EntityId i = 0; i < static_cast<EntityId>(store_.size()); ++i)
    alias_root_[static_cast<std::size_t>(i)] = i;

  // Plain union-find; fully compressed below so lookups stay const.
  auto find = [&](EntityId x) {
    while (alias_root_[static_cast<std::size_t>(x)] != x)
      x = alias_root_[static_cast<std::size_t>(x)];
    return x;
  };

  for (std::size_t i = 0; i < triples_.size(); ++i) {
    const Triple& t = triples_[i];
    by_head_[t.head].push_back(i);
    by_tail_[t.tail].push_back(i);
    if (t.relation == RelationType::HasAlias) {
      EntityId a = find(t.head);
      EntityId b = find(t.tail);
      if (a != b) alias_root_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }
  for (EntityId i = 0; i < static_cast<EntityId>(store_.size()); ++i)
    alias_root_[static_cast<std::size_t>(i)] = find(i);
}

EntityId KnowledgeGraph::alias_find(EntityId id) const {
  return alias_root_[static_cast<std::size_t>(id)];
}

NeighborhoodSet KnowledgeGraph::neighborhood(EntityId id) const {
  if (!store_.contains(id)) throw ContractError("unknown entity id " + std::to_string(id));
  NeighborhoodSet out;
  auto h = by_head_.find(id);
  if (h != by_head_.end()) {
    for (std::size_t i : h->second)
      out.insert({triples_[i].relation, Direction::Outgoing, triples_[i].tail});
  }
  auto t = by_tail_.find(id);
  if (t != by_tail_.end()) {
    for (std::size_t i : t->second)
      out.insert({triples_[i].relation, Direction::Incoming, triples_[i].head});
  }
  return out;
}

std::set<EntityId> KnowledgeGraph::alias_class(EntityId id) const {
  if (!store_.contains(id)) throw ContractError("unknown entity id " + std::to_string(id));
  std::set<EntityId> out;
  EntityId root = alias_find(id);
  for (EntityId i = 0; i < static_cast<EntityId>(store_.size()); ++i) {
    if (alias_find(i) == root) out.insert(i);
  }
  return out;
}

std::set<EntityId> KnowledgeGraph::query_tails(EntityId head, RelationType r) const {
  if (!store_.contains(head)) throw ContractError("unknown entity id " + std::to_string(head));
  if (r == RelationType::HasAlias) {
    std::set<EntityId> out = alias_class(head);
    out.erase(head);
    return out;
  }
  std::set<EntityId> out;
  auto it = by_head_.find(head);
  if (it != by_head_.end()) {
    for (std::size_t i : it->second)
      if (triples_[i].relation == r) out.insert(triples_[i].tail);
  }
  return out;
}

std::set<EntityId> KnowledgeGraph::query_heads(RelationType r, EntityId tail) const {
  if (!store_.contains(tail)) throw ContractError("unknown entity id " + std::to_string(tail));
  if (r == RelationType::HasAlias) {
    std::set<EntityId> out = alias_class(tail);
    out.erase(tail);
    return out;
  }
  std::set<EntityId> out;
  auto it = by_tail_.find(tail);
  if (it != by_tail_.end()) {
    for (std::size_t i : it->second)
      if (triples_[i].relation == r) out.insert(triples_[i].head);
  }
  return out;
}

bool KnowledgeGraph::audit_consistency() const {
  std::set<Triple> unique(triples_.begin(), triples_.end());
  if (unique.size() != triples_.size()) return false;
  for (const Triple& t : triples_) {
    if (!validate_triple(t, store_).ok()) return false;
    if (t.relation == RelationType::HasAlias && t.head > t.tail) return false;
  }
  std::size_t indexed = 0;
  for (const auto& [head, idxs] : by_head_) {
    for (std::size_t i : idxs) {
      if (i >= triples_.size() || triples_[i].head != head) return false;
      ++indexed;
    }
  }
  if (indexed != triples_.size()) return false;
  indexed = 0;
  for (const auto& [tail, idxs] : by_tail_) {
    for (std::size_t i : idxs) {
      if (i >= triples_.size() || triples_[i].tail != tail) return false;
      ++indexed;
    }
  }
  return indexed == triples_.size();
}

void KnowledgeGraph::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json entities = nlohmann::json::array();
  for (const Entity& e : store_.entities()) {
    nlohmann::json j;
    j["name"] = e.canonical_name;
    j["class"] = to_string(e.entity_class);
    j["surface_forms"] = e.surface_forms;
    j["mention_count"] = e.mention_count;
    entities.push_back(std::move(j));
  }
  nlohmann::json root;
  root["format_version"] = 1;
  root["entities"] = std::move(entities);
  write_file(dir / "entities.json", root.dump(2) + "\n");

  std::ostringstream tsv;
  write_triples_tsv(tsv, store_, triples_);
  write_file(dir / "triples.tsv", tsv.str());
}

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& dir) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(read_file(dir / "entities.json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("entities.json: ") + e.what(), 0);
  }
  if (root.value("format_version", 0) != 1)
    throw ParseError("entities.json: unsupported format_version", 0);

  KnowledgeGraph graph;
  for (const auto& j : root.at("entities")) {
    auto cls = entity_class_from(j.at("class").get<std::string>());
    if (!cls) throw ParseError("entities.json: unknown class", 0);
    EntityId id = graph.store_.intern(j.at("name").get<std::string>(), *cls);
    Entity& e = graph.store_.get_mutable(id);
    e.mention_count = j.value("mention_count", std::int64_t{0});
    for (const auto& s : j.value("surface_forms", nlohmann::json::array()))
      e.surface_forms.insert(s.get<std::string>());
  }

  std::size_t line_no = 0;
  for (const std::string& raw : split(read_file(dir / "triples.tsv"), '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f = split(raw, '\t');
    if (f.size() != 5 && f.size() != 6)
      throw ParseError("triples.tsv: expected 5 or 6 fields", line_no);
    auto head_cls = entity_class_from(f[1]);
    auto rel = relation_from(f[2]);
    auto tail_cls = entity_class_from(f[4]);
    if (!head_cls || !rel || !tail_cls)
      throw ParseError("triples.tsv: unknown class or relation", line_no);
    auto h = graph.store_.find(f[0], *head_cls);
    auto t = graph.store_.find(f[3], *tail_cls);
    if (!h || !t) throw ParseError("triples.tsv: entity not in entities.json", line_no);
    Triple triple;
    triple.head = *h;
    triple.relation = *rel;
    triple.tail = *t;
    if (f.size() == 6) {
      for (const std::string& doc : split(f[5], ','))
        if (!doc.empty()) triple.provenance.insert(doc);
    }
    ValidationResult v = validate_triple(triple, graph.store_);
    if (!v.ok()) throw ParseError("triples.tsv: " + v.detail, line_no);
    graph.triples_.push_back(std::move(triple));
  }
  graph.index();
  return graph;
}

std::vector<SimilarityHit> most_similar(const KnowledgeGraph& graph, EntityId query,
                                        const SimilarityOptions& options) {
  const EntityStore& store = graph.entities();
  const Entity& q = store.get(query);

  auto collapse = [&](NeighborhoodSet s) {
    if (!options.direction_agnostic) return s;
    NeighborhoodSet out;
    for (NeighborhoodItem item : s) {
      item.direction = Direction::Outgoing;
      out.insert(item);
    }
    return out;
  };

  // Actors are thin nodes: most of what is known about them hangs off the
  // malware they authored, so fold those neighborhoods in.
  auto effective = [&](EntityId id) {
    NeighborhoodSet s = graph.neighborhood(id);
    if (store.get(id).entity_class == EntityClass::ThreatActor) {
      for (EntityId m : graph.query_heads(RelationType::HasAuthor, id)) {
        if (store.get(m).entity_class != EntityClass::Malware) continue;
        NeighborhoodSet extra = graph.neighborhood(m);
        s.insert(extra.begin(), extra.end());
      }
    }
    return collapse(std::move(s));
  };

  NeighborhoodSet query_set = effective(query);
  std::vector<SimilarityHit> hits;
  for (const Entity& e : store.entities()) {
    if (e.id == query || e.entity_class != q.entity_class) continue;
    hits.push_back({e.id, jaccard_similarity(query_set, effective(e.id))});
  }
  std::sort(hits.begin(), hits.end(), [](const SimilarityHit& a, const SimilarityHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.entity < b.entity;
  });
  if (hits.size() > options.k) hits.resize(options.k);
  return hits;
}

std::optional<EntityId> primary_entity(std::span<const Mention> mentions,
                                       const EntityStore& store, EntityClass cls) {
  std::map<EntityId, std::pair<std::size_t, std::size_t>> stats;  // id -> (count, first offset)
  for (const Mention& m : mentions) {
    if (!store.contains(m.entity) || store.get(m.entity).entity_class != cls) continue;
    auto it = stats.find(m.entity);
    if (it == stats.end()) {
      stats[m.entity] = {1, m.offset};
    } else {
      it->second.first += 1;
      it->second.second = std::min(it->second.second, m.offset);
    }
  }
  std::optional<EntityId> best;
  for (const auto& [id, s] : stats) {
    if (!best) {
      best = id;
      continue;
    }
    const auto& b = stats.at(*best);
    if (s.first > b.first || (s.first == b.first && s.second < b.second)) best = id;
  }
  return best;
}

}  // namespace ladder
