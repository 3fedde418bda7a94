#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ladder/errors.hpp"
#include "ladder/graph.hpp"
#include "ladder/rng.hpp"
#include "ladder/triple_io.hpp"
#include "test_util.hpp"

using namespace ladder;

namespace {

KnowledgeGraph fixture_graph(bool cleanup = true) {
  auto p = parse_triples_file(testing::fixture_dir() / "cerberus_triples.tsv");
  BuildOptions opt;
  opt.cleanup = cleanup;
  return KnowledgeGraph::build(p.entities, p.triples, opt);
}

EntityId id_of(const KnowledgeGraph& g, const std::string& name, EntityClass cls) {
  auto id = g.entities().find(name, cls);
  REQUIRE(id.has_value());
  return *id;
}

}  // namespace

TEST_CASE("jaccard similarity on neighborhood sets") {
  NeighborhoodSet a = {{RelationType::Uses, Direction::Outgoing, 1},
                       {RelationType::Uses, Direction::Outgoing, 2},
                       {RelationType::Targets, Direction::Outgoing, 3}};
  NeighborhoodSet b = {{RelationType::Uses, Direction::Outgoing, 1},
                       {RelationType::Uses, Direction::Outgoing, 2},
                       {RelationType::Targets, Direction::Outgoing, 4}};
  CHECK(jaccard_similarity(a, b) == doctest::Approx(2.0 / 4.0));
  CHECK(jaccard_similarity(a, a) == doctest::Approx(1.0));
  CHECK(jaccard_similarity({}, {}) == doctest::Approx(1.0));
  CHECK(jaccard_similarity(a, {}) == doctest::Approx(0.0));
}

TEST_CASE("build validates, normalizes aliases, merges duplicates and cleans up") {
  // The fixture's one duplicate line folds at parse time, so the graph build
  // receives already-unique triples and counts no merges of its own.
  auto parsed = parse_triples_file(testing::fixture_dir() / "cerberus_triples.tsv");
  CHECK(parsed.duplicates_merged == 1);

  auto g = fixture_graph();
  CHECK(g.audit().duplicates_merged == 0);

  // ShadowCrew appears once, so cleanup removes it and its triple.
  REQUIRE(g.audit().removed_entities.size() == 1);
  CHECK(g.audit().removed_entities[0].name == "ShadowCrew");
  CHECK(g.audit().removed_entities[0].reason == "mentioned at most once in the corpus");
  REQUIRE(g.audit().rejected_triples.size() == 1);
  CHECK(g.audit().rejected_triples[0].reason == "endpoint removed by cleanup");
  CHECK(g.audit().rejected_triples[0].triple.relation == RelationType::HasAuthor);

  CHECK_FALSE(g.entities().find("ShadowCrew", EntityClass::ThreatActor).has_value());
  CHECK(g.entities().find("Ghost", EntityClass::Malware).has_value());
  CHECK(g.audit_consistency());

  // 12 parsed triples minus the removed hasAuthor edge.
  CHECK(g.triples().size() == 11);
}

TEST_CASE("cleanup can be disabled") {
  auto g = fixture_graph(false);
  CHECK(g.entities().find("ShadowCrew", EntityClass::ThreatActor).has_value());
  CHECK(g.audit().removed_entities.empty());
  CHECK(g.triples().size() == 12);
  CHECK(g.audit_consistency());
}

TEST_CASE("build merges duplicates handed to it, including flipped aliases") {
  EntityStore store;
  EntityId a = store.intern("A", EntityClass::Malware);
  EntityId b = store.intern("B", EntityClass::Malware);
  EntityId t = store.intern("T1001", EntityClass::AttackPattern);
  std::vector<Triple> triples = {{a, RelationType::Uses, t, {"doc1"}, {}},
                                 {a, RelationType::Uses, t, {"doc2"}, {}},
                                 {a, RelationType::HasAlias, b, {}, {}},
                                 {b, RelationType::HasAlias, a, {}, {}}};
  BuildOptions opt;
  opt.cleanup = false;
  auto g = KnowledgeGraph::build(store, triples, opt);
  CHECK(g.audit().duplicates_merged == 2);
  REQUIRE(g.triples().size() == 2);
  for (const Triple& triple : g.triples()) {
    if (triple.relation == RelationType::Uses)
      CHECK(triple.provenance == std::set<std::string>{"doc1", "doc2"});
  }
  CHECK(g.audit_consistency());
}

TEST_CASE("a surface form shared across classes evicts the malware reading") {
  EntityStore store;
  EntityId m1 = store.intern("Zeus", EntityClass::Malware);
  EntityId app = store.intern("Zeus", EntityClass::Application);
  EntityId m2 = store.intern("Anchor", EntityClass::Malware);
  EntityId ap = store.intern("T1001", EntityClass::AttackPattern);
  store.get_mutable(m1).mention_count = 5;
  store.get_mutable(app).mention_count = 5;
  store.get_mutable(m2).mention_count = 5;
  store.get_mutable(ap).mention_count = 5;

  std::vector<Triple> triples = {{m1, RelationType::Uses, ap, {}, {}},
                                 {m2, RelationType::Uses, ap, {}, {}}};
  auto g = KnowledgeGraph::build(store, triples, {});

  CHECK_FALSE(g.entities().find("Zeus", EntityClass::Malware).has_value());
  CHECK(g.entities().find("Zeus", EntityClass::Application).has_value());
  CHECK(g.entities().find("Anchor", EntityClass::Malware).has_value());
  REQUIRE(g.audit().removed_entities.size() == 1);
  CHECK(g.audit().removed_entities[0].reason ==
        "surface form 'Zeus' also occurs under another class");
  CHECK(g.triples().size() == 1);
}

TEST_CASE("alias edges store smaller-id-first and answer as equivalence classes") {
  EntityStore store;
  EntityId a = store.intern("A", EntityClass::Malware);
  EntityId b = store.intern("B", EntityClass::Malware);
  EntityId c = store.intern("C", EntityClass::Malware);
  EntityId ap = store.intern("T1001", EntityClass::AttackPattern);
  for (EntityId e : {a, b, c, ap}) store.get_mutable(e).mention_count = 3;

  // Deliberately reversed orientation; transitive chain A~B~C.
  std::vector<Triple> triples = {{b, RelationType::HasAlias, a, {}, {}},
                                 {c, RelationType::HasAlias, b, {}, {}},
                                 {a, RelationType::Uses, ap, {}, {}}};
  auto g = KnowledgeGraph::build(store, triples, {});

  for (const Triple& t : g.triples()) {
    if (t.relation == RelationType::HasAlias) CHECK(t.head < t.tail);
  }
  CHECK(g.alias_class(a) == std::set<EntityId>{a, b, c});
  CHECK(g.query_tails(a, RelationType::HasAlias) == std::set<EntityId>{b, c});
  CHECK(g.query_tails(c, RelationType::HasAlias) == std::set<EntityId>{a, b});
  CHECK(g.audit_consistency());
}

TEST_CASE("queries answer both directions") {
  auto g = fixture_graph();
  EntityId cerberus = id_of(g, "Cerberus", EntityClass::Malware);
  EntityId anubis = id_of(g, "Anubis", EntityClass::Malware);
  EntityId t1412 = id_of(g, "T1412", EntityClass::AttackPattern);
  EntityId t1513 = id_of(g, "T1513", EntityClass::AttackPattern);

  CHECK(g.query_tails(cerberus, RelationType::Uses) == std::set<EntityId>{t1513, t1412});
  CHECK(g.query_heads(RelationType::Uses, t1412) == std::set<EntityId>{cerberus, anubis});
  CHECK(g.query_tails(cerberus, RelationType::HasAlias) ==
        std::set<EntityId>{id_of(g, "Alien", EntityClass::Malware)});
  CHECK(g.query_tails(t1412, RelationType::Uses).empty());
  CHECK_THROWS_AS(g.neighborhood(kNoEntity), ContractError);
}

TEST_CASE("neighborhoods list every touching edge") {
  auto g = fixture_graph();
  EntityId alien = id_of(g, "Alien", EntityClass::Malware);
  EntityId cerberus = id_of(g, "Cerberus", EntityClass::Malware);
  EntityId t1513 = id_of(g, "T1513", EntityClass::AttackPattern);

  NeighborhoodSet expect = {
      {RelationType::Uses, Direction::Outgoing, t1513},
      {RelationType::HasAlias, Direction::Incoming, cerberus},
  };
  CHECK(g.neighborhood(alien) == expect);
}

TEST_CASE("most_similar matches a brute-force sweep on random graphs") {
  Rng rng(202);
  for (int round = 0; round < 10; ++round) {
    EntityStore store;
    std::vector<EntityId> malware, techniques;
    int nm = 5 + int(rng.bounded(10));
    int nt = 4 + int(rng.bounded(6));
    for (int i = 0; i < nm; ++i) {
      EntityId id = store.intern("m" + std::to_string(i), EntityClass::Malware);
      store.get_mutable(id).mention_count = 5;
      malware.push_back(id);
    }
    for (int i = 0; i < nt; ++i) {
      EntityId id = store.intern("t" + std::to_string(i), EntityClass::AttackPattern);
      store.get_mutable(id).mention_count = 5;
      techniques.push_back(id);
    }
    std::vector<Triple> triples;
    for (EntityId m : malware) {
      for (EntityId t : techniques) {
        if (rng.next_double() < 0.4) triples.push_back({m, RelationType::Uses, t, {}, {}});
      }
    }
    auto g = KnowledgeGraph::build(store, triples, {});

    for (EntityId q : malware) {
      if (!g.entities().contains(q)) continue;
      SimilarityOptions opt;
      opt.k = 3;
      auto got = most_similar(g, q, opt);

      // Independent recomputation: same-class candidates, score descending,
      // id ascending on ties.
      std::vector<SimilarityHit> want;
      for (EntityId c : malware) {
        if (c == q || !g.entities().contains(c)) continue;
        want.push_back({c, jaccard_similarity(g.neighborhood(q), g.neighborhood(c))});
      }
      std::stable_sort(want.begin(), want.end(), [](const auto& x, const auto& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.entity < y.entity;
      });
      if (want.size() > opt.k) want.resize(opt.k);

      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].entity == want[i].entity);
        CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("direction-agnostic comparison can align flipped edges") {
  EntityStore store;
  EntityId a = store.intern("a", EntityClass::Malware);
  EntityId b = store.intern("b", EntityClass::Malware);
  EntityId c = store.intern("c", EntityClass::Malware);
  for (EntityId e : {a, b, c}) store.get_mutable(e).mention_count = 3;

  // a points at c; c points at b. Sensitive to direction, a and b share
  // nothing; ignoring direction they share the variantOf edge to c.
  std::vector<Triple> triples = {{a, RelationType::VariantOf, c, {}, {}},
                                 {c, RelationType::VariantOf, b, {}, {}}};
  auto g = KnowledgeGraph::build(store, triples, {});

  SimilarityOptions sensitive;
  sensitive.k = 1;
  auto strict = most_similar(g, a, sensitive);
  REQUIRE(strict.size() == 1);
  CHECK(strict[0].score == doctest::Approx(0.0));

  SimilarityOptions agnostic;
  agnostic.k = 1;
  agnostic.direction_agnostic = true;
  auto loose = most_similar(g, a, agnostic);
  REQUIRE(loose.size() == 1);
  CHECK(loose[0].entity == b);
  CHECK(loose[0].score == doctest::Approx(1.0));
}

TEST_CASE("threat actors borrow their tooling's neighborhoods") {
  EntityStore store;
  EntityId x = store.intern("ActorX", EntityClass::ThreatActor);
  EntityId y = store.intern("ActorY", EntityClass::ThreatActor);
  EntityId z = store.intern("ActorZ", EntityClass::ThreatActor);
  EntityId m1 = store.intern("M1", EntityClass::Malware);
  EntityId m2 = store.intern("M2", EntityClass::Malware);
  EntityId m3 = store.intern("M3", EntityClass::Malware);
  EntityId t1 = store.intern("T1001", EntityClass::AttackPattern);
  EntityId t2 = store.intern("T1002", EntityClass::AttackPattern);
  EntityId t3 = store.intern("T1003", EntityClass::AttackPattern);
  for (EntityId e : {x, y, z, m1, m2, m3, t1, t2, t3}) store.get_mutable(e).mention_count = 4;

  std::vector<Triple> triples = {
      {m1, RelationType::HasAuthor, x, {}, {}}, {m2, RelationType::HasAuthor, y, {}, {}},
      {m3, RelationType::HasAuthor, z, {}, {}}, {m1, RelationType::Uses, t1, {}, {}},
      {m1, RelationType::Uses, t2, {}, {}},     {m2, RelationType::Uses, t1, {}, {}},
      {m2, RelationType::Uses, t2, {}, {}},     {m3, RelationType::Uses, t3, {}, {}},
  };
  auto g = KnowledgeGraph::build(store, triples, {});

  // X and Y author different malware with identical technique sets; Z's
  // tooling shares nothing. Without augmentation every actor neighborhood
  // is a single distinct incoming hasAuthor edge, so all scores tie at 0.
  auto hits = most_similar(g, x, {});
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].entity == y);
  CHECK(hits[0].score > hits[1].score);
  CHECK(hits[1].entity == z);
}

TEST_CASE("save and load round-trip the graph") {
  testing::TempDir tmp;
  auto g = fixture_graph();
  g.save(tmp.path());
  auto loaded = KnowledgeGraph::load(tmp.path());

  CHECK(loaded.audit_consistency());
  CHECK(loaded.entities().size() == g.entities().size());
  REQUIRE(loaded.triples().size() == g.triples().size());

  for (const Triple& t : g.triples()) {
    const Entity& h = g.entities().get(t.head);
    const Entity& tl = g.entities().get(t.tail);
    auto lh = loaded.entities().find(h.canonical_name, h.entity_class);
    auto lt = loaded.entities().find(tl.canonical_name, tl.entity_class);
    REQUIRE(lh.has_value());
    REQUIRE(lt.has_value());
    auto tails = loaded.query_tails(*lh, t.relation);
    CHECK(tails.count(*lt) == 1);
  }

  // Surface forms and mention counts survive.
  EntityId cerberus = id_of(loaded, "Cerberus", EntityClass::Malware);
  CHECK(loaded.entities().get(cerberus).mention_count == 5);
}

TEST_CASE("primary_entity picks the most mentioned, earliest on ties") {
  EntityStore store;
  EntityId m1 = store.intern("m1", EntityClass::Malware);
  EntityId m2 = store.intern("m2", EntityClass::Malware);
  EntityId os = store.intern("android", EntityClass::OS);

  std::vector<Mention> mentions = {{m2, 40}, {m1, 10}, {m2, 80}, {os, 0}, {m1, 90}};
  CHECK(primary_entity(mentions, store, EntityClass::Malware) == m1);

  std::vector<Mention> counted = {{m2, 5}, {m1, 10}, {m2, 20}};
  CHECK(primary_entity(counted, store, EntityClass::Malware) == m2);

  CHECK(primary_entity(mentions, store, EntityClass::ThreatActor) == std::nullopt);
  CHECK(primary_entity({}, store, EntityClass::Malware) == std::nullopt);
}
