#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ladder/dataset_split.hpp"
#include "ladder/errors.hpp"
#include "ladder/triple_io.hpp"
#include "test_util.hpp"

using namespace ladder;

namespace {

struct Grid {
  EntityStore store;
  std::vector<Triple> triples;
  std::vector<EntityId> malware;
  std::vector<EntityId> techniques;
};

// 5 malware x 4 techniques, fully connected, each malware anchored by an
// isA triple so every pool triple stays eligible.
Grid grid_corpus() {
  Grid g;
  EntityId banker = g.store.intern("banking trojan", EntityClass::MalwareType);
  for (int i = 0; i < 5; ++i) {
    g.malware.push_back(g.store.intern("m" + std::to_string(i), EntityClass::Malware));
  }
  for (int j = 0; j < 4; ++j) {
    g.techniques.push_back(g.store.intern("T140" + std::to_string(j), EntityClass::AttackPattern));
  }
  for (EntityId m : g.malware) {
    g.triples.push_back({m, RelationType::IsA, banker, {}, {}});
    for (EntityId t : g.techniques) {
      g.triples.push_back({m, RelationType::Uses, t, {}, {}});
    }
  }
  return g;
}

std::multiset<std::string> signature(const EntityStore& store, const std::vector<Triple>& ts) {
  std::multiset<std::string> out;
  for (const Triple& t : ts) {
    out.insert(store.get(t.head).canonical_name + "|" + to_string(t.relation) + "|" +
               store.get(t.tail).canonical_name);
  }
  return out;
}

}  // namespace

TEST_CASE("the split partitions the input") {
  auto g = grid_corpus();
  auto split = split_dataset(g.store, g.triples, 0.25, 1);
  CHECK(split.train.size() + split.test.size() == g.triples.size());

  auto whole = signature(g.store, g.triples);
  auto merged = signature(g.store, split.train);
  for (const auto& s : signature(g.store, split.test)) merged.insert(s);
  CHECK(merged == whole);
}

TEST_CASE("only malware-headed pool triples are eligible for test") {
  auto g = grid_corpus();
  auto split = split_dataset(g.store, g.triples, 1.0, 3);
  for (const Triple& t : split.test) {
    CHECK(g.store.get(t.head).entity_class == EntityClass::Malware);
    EntityClass tail = g.store.get(t.tail).entity_class;
    bool pool_class = tail == EntityClass::AttackPattern || tail == EntityClass::Location ||
                      tail == EntityClass::Application || tail == EntityClass::Organization;
    CHECK(pool_class);
    CHECK(t.relation != RelationType::IsA);
  }
  // The isA anchors always stay in train.
  std::size_t anchors = 0;
  for (const Triple& t : split.train) anchors += t.relation == RelationType::IsA;
  CHECK(anchors == 5);
}

TEST_CASE("a quarter of a 20-triple pool is exactly five") {
  auto g = grid_corpus();
  auto split = split_dataset(g.store, g.triples, 0.25, 7);
  CHECK(split.test.size() == 5);
}

TEST_CASE("fraction bounds behave") {
  auto g = grid_corpus();
  CHECK(split_dataset(g.store, g.triples, 0.0, 1).test.empty());
  CHECK_THROWS_AS(split_dataset(g.store, g.triples, -0.1, 1), ContractError);
  CHECK_THROWS_AS(split_dataset(g.store, g.triples, 1.5, 1), ContractError);
}

TEST_CASE("every held-out endpoint keeps a training triple") {
  auto g = grid_corpus();
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 9ULL}) {
    CAPTURE(seed);
    auto split = split_dataset(g.store, g.triples, 1.0, seed);
    std::set<EntityId> train_touch;
    for (const Triple& t : split.train) {
      train_touch.insert(t.head);
      train_touch.insert(t.tail);
    }
    for (const Triple& t : split.test) {
      CHECK(train_touch.count(t.head) == 1);
      CHECK(train_touch.count(t.tail) == 1);
    }
  }
}

TEST_CASE("the same seed reproduces the split") {
  auto g = grid_corpus();
  auto a = split_dataset(g.store, g.triples, 0.25, 5);
  auto b = split_dataset(g.store, g.triples, 0.25, 5);
  CHECK(signature(g.store, a.test) == signature(g.store, b.test));
  CHECK(signature(g.store, a.train) == signature(g.store, b.train));

  // Different seeds explore different subsets somewhere in a small range.
  std::set<std::multiset<std::string>> seen;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    seen.insert(signature(g.store, split_dataset(g.store, g.triples, 0.25, seed).test));
  }
  CHECK(seen.size() > 1);
}

TEST_CASE("leaving out one malware removes exactly its technique usage") {
  auto p = parse_triples_file(testing::fixture_dir() / "cerberus_triples.tsv");
  EntityId anubis = *p.entities.find("Anubis", EntityClass::Malware);

  auto result = leave_out_attack_patterns(p.entities, p.triples, anubis);
  CHECK(result.removed.size() == 2);
  for (const Triple& t : result.removed) {
    CHECK(t.head == anubis);
    CHECK(t.relation == RelationType::Uses);
    CHECK(p.entities.get(t.tail).entity_class == EntityClass::AttackPattern);
  }
  CHECK(result.remaining.size() + result.removed.size() == p.triples.size());

  // Anubis keeps its non-technique context.
  bool keeps_targets = false;
  for (const Triple& t : result.remaining) {
    if (t.head == anubis && t.relation == RelationType::Targets) keeps_targets = true;
    CHECK_FALSE((t.head == anubis && t.relation == RelationType::Uses &&
                 p.entities.get(t.tail).entity_class == EntityClass::AttackPattern));
  }
  CHECK(keeps_targets);
}

TEST_CASE("leave-out rejects non-malware subjects") {
  auto p = parse_triples_file(testing::fixture_dir() / "cerberus_triples.tsv");
  EntityId ap = *p.entities.find("T1412", EntityClass::AttackPattern);
  CHECK_THROWS_AS(leave_out_attack_patterns(p.entities, p.triples, ap), ContractError);
  CHECK_THROWS_AS(leave_out_attack_patterns(p.entities, p.triples, kNoEntity), ContractError);
}
