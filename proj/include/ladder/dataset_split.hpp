#pragma once

#include <cstdint>
#include <vector>

#include "ladder/ontology.hpp"

namespace ladder {

struct SplitResult {
  std::vector<Triple> train;
  std::vector<Triple> test;
};

// Holds out `fraction` of the link-prediction pool for testing. The pool is
// the Malware-headed triples whose tail is an AttackPattern, Location,
// Application, or Organization; everything else always stays in train. A
// pool triple is only eligible while both its endpoints keep at least one
// other training triple, so the test set never strands an entity the model
// cannot learn. Selection order is a seeded shuffle; the same seed gives the
// same split. The test set may come up short of round(fraction * pool) when
// eligibility runs out.
SplitResult split_dataset(const EntityStore& store, const std::vector<Triple>& triples,
                          double fraction, std::uint64_t seed);

struct LeaveOutResult {
  std::vector<Triple> remaining;
  std::vector<Triple> removed;  // the ⟨malware, uses, AttackPattern⟩ triples
};

// Removes every attack-pattern usage of one malware family, for the
// "rediscover what we hid" probe. Throws ContractError if `malware` is not
// a Malware entity in the store.
LeaveOutResult leave_out_attack_patterns(const EntityStore& store,
                                         const std::vector<Triple>& triples, EntityId malware);

}  // namespace ladder
