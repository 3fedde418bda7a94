#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ladder/tucker.hpp"

namespace ladder {

// A triple in model index space.
struct IndexTriple {
  Eigen::Index head = 0;
  Eigen::Index relation = 0;
  Eigen::Index tail = 0;

  friend bool operator<(const IndexTriple& a, const IndexTriple& b) {
    if (a.head != b.head) return a.head < b.head;
    if (a.relation != b.relation) return a.relation < b.relation;
    return a.tail < b.tail;
  }
  friend bool operator==(const IndexTriple&, const IndexTriple&) = default;
};

// Rank of `tail` among candidate tails by descending score. Entities in
// `exclude` (other known-true tails under the filtered protocol) do not
// compete; the true tail always does. Ties count against the ranked tail,
// so rank = 1 + |{c : score(c) >= score(tail), c competing, c != tail}|.
std::size_t rank_of(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
                    Eigen::Index tail, const std::set<Eigen::Index>& exclude = {});

struct EvalOptions {
  bool filtered = true;
  std::vector<int> hits_at = {3, 10, 30};
};

struct ClassMetrics {
  std::size_t count = 0;
  double mrr = 0.0;
  std::map<int, double> hits;  // n -> fraction of ranks <= n
};

struct EvalReport {
  bool filtered = true;
  ClassMetrics overall;
  // Keyed by the class of the predicted tail entity.
  std::map<EntityClass, ClassMetrics> per_class;
};

// Ranks every test triple as a tail query. Under the filtered protocol the
// other true tails of (h, r) from `known_true` (typically train + test) are
// excluded from competition. MRR is the mean reciprocal rank; hits@n the
// fraction of ranks <= n.
EvalReport evaluate(const TuckerModel& model, const std::vector<IndexTriple>& test,
                    const std::vector<IndexTriple>& known_true, const EvalOptions& options = {});

// MRR and hits computed directly from a list of ranks; evaluate() must agree
// with this on its own rank list, and tests verify it does.
ClassMetrics metrics_from_ranks(const std::vector<std::size_t>& ranks,
                                const std::vector<int>& hits_at);

std::string eval_report_to_json(const EvalReport& report);

struct PredictOptions {
  std::size_t k = 10;
  // When set, only tails of these classes compete.
  std::optional<std::set<EntityClass>> allowed_classes;
  // Known tails to hide from the ranking, e.g. the training answers.
  std::set<Eigen::Index> exclude;
};

struct RankedPrediction {
  Eigen::Index tail = 0;
  double confidence = 0.0;  // logistic(score), strictly inside (0, 1)
  std::size_t rank = 0;     // 1-based within this prediction list
};

// Top-k tails for ⟨head, relation, ?⟩ by descending confidence; ties break
// toward the smaller entity index. Never returns the head itself.
std::vector<RankedPrediction> predict_tails(const TuckerModel& model, Eigen::Index head,
                                            Eigen::Index relation,
                                            const PredictOptions& options = {});

// Converts store-space triples into model index space. Triples whose
// endpoints or relation fall outside the model vocabulary are skipped when
// `skipped` is given, and an error otherwise.
std::vector<IndexTriple> to_index_triples(const TuckerModel& model, const EntityStore& store,
                                          const std::vector<Triple>& triples,
                                          std::vector<Triple>* skipped = nullptr);

}  // namespace ladder
