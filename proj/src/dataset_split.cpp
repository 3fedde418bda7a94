#include "ladder/dataset_split.hpp"

#include <cmath>
#include <map>

#include "ladder/errors.hpp"
#include "ladder/rng.hpp"

namespace ladder {

namespace {

bool pool_tail_class(EntityClass cls) {
  return cls == EntityClass::AttackPattern || cls == EntityClass::Location ||
         cls == EntityClass::Application || cls == EntityClass::Organization;
}

}  // namespace

SplitResult split_dataset(const EntityStore& store, const std::vector<Triple>& triples,
                          double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw ContractError("split fraction must lie in [0, 1]");

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    if (store.get(t.head).entity_class == EntityClass::Malware &&
        pool_tail_class(store.get(t.tail).entity_class))
      pool.push_back(i);
  }

  const auto target =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pool.size())));

  // How many training triples each entity still appears in; moving a triple
  // to test is allowed only while both endpoints would keep at least one.
  std::map<EntityId, std::size_t> occurrences;
  for (const Triple& t : triples) {
    occurrences[t.head] += 1;
    occurrences[t.tail] += 1;
  }

  Rng rng(seed);
  rng.shuffle(pool);

  std::vector<bool> held(triples.size(), false);
  std::size_t taken = 0;
  for (std::size_t idx : pool) {
    if (taken == target) break;
    const Triple& t = triples[idx];
    if (occurrences[t.head] < 2 || occurrences[t.tail] < 2) continue;
    occurrences[t.head] -= 1;
    occurrences[t.tail] -= 1;
    held[idx] = true;
    ++taken;
  }

  SplitResult out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    (held[i] ? out.test : out.train).push_back(triples[i]);
  }
  return out;
}

LeaveOutResult leave_out_attack_patterns(const EntityStore& store,
                                         const std::vector<Triple>& triples, EntityId malware) {
  if (!store.contains(malware) ||
      store.get(malware).entity_class != EntityClass::Malware)
    throw ContractError("leave_out_attack_patterns requires a Malware entity");

  LeaveOutResult out;
  for (const Triple& t : triples) {
    bool removed = t.head == malware && t.relation == RelationType::Uses &&
                   store.get(t.tail).entity_class == EntityClass::AttackPattern;
    (removed ? out.removed : out.remaining).push_back(t);
  }
  return out;
}

}  // namespace ladder
