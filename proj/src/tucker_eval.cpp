#include "ladder/tucker_eval.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "ladder/errors.hpp"

namespace ladder {

std::size_t rank_of(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
                    Eigen::Index tail, const std::set<Eigen::Index>& exclude) {
  Eigen::VectorXd scores = model.score_all_tails(head, relation);
  if (tail < 0 || tail >= scores.size()) throw ContractError("tail index out of range");
  const double target = scores(tail);
  std::size_t rank = 1;
  for (Eigen::Index c = 0; c < scores.size(); ++c) {
    if (c == tail || exclude.count(c)) continue;
    if (scores(c) >= target) ++rank;
  }
  return rank;
}

ClassMetrics metrics_from_ranks(const std::vector<std::size_t>& ranks,
                                const std::vector<int>& hits_at) {
  ClassMetrics m;
  m.count = ranks.size();
  for (int n : hits_at) m.hits[n] = 0.0;
  if (ranks.empty()) return m;
  double recip = 0.0;
  for (std::size_t r : ranks) {
    recip += 1.0 / static_cast<double>(r);
    for (int n : hits_at) {
      if (r <= static_cast<std::size_t>(n)) m.hits[n] += 1.0;
    }
  }
  m.mrr = recip / static_cast<double>(ranks.size());
  for (int n : hits_at) m.hits[n] /= static_cast<double>(ranks.size());
  return m;
}

EvalReport evaluate(const TuckerModel& model, const std::vector<IndexTriple>& test,
                    const std::vector<IndexTriple>& known_true, const EvalOptions& options) {
  // All true tails per (h, r), for the filtered protocol.
  std::map<std::pair<Eigen::Index, Eigen::Index>, std::set<Eigen::Index>> truth;
  if (options.filtered) {
    for (const IndexTriple& t : known_true) truth[{t.head, t.relation}].insert(t.tail);
    for (const IndexTriple& t : test) truth[{t.head, t.relation}].insert(t.tail);
  }

  std::vector<std::size_t> all_ranks;
  std::map<EntityClass, std::vector<std::size_t>> class_ranks;
  all_ranks.reserve(test.size());
  for (const IndexTriple& t : test) {
    std::set<Eigen::Index> exclude;
    if (options.filtered) {
      exclude = truth[{t.head, t.relation}];
      exclude.erase(t.tail);
    }
    std::size_t rank = rank_of(model, t.head, t.relation, t.tail, exclude);
    all_ranks.push_back(rank);
    class_ranks[model.entity(t.tail).entity_class].push_back(rank);
  }

  EvalReport report;
  report.filtered = options.filtered;
  report.overall = metrics_from_ranks(all_ranks, options.hits_at);
  for (const auto& [cls, ranks] : class_ranks)
    report.per_class[cls] = metrics_from_ranks(ranks, options.hits_at);
  return report;
}

std::string eval_report_to_json(const EvalReport& report) {
  auto metrics_json = [](const ClassMetrics& m) {
    nlohmann::json j;
    j["count"] = m.count;
    j["mrr"] = m.mrr;
    nlohmann::json hits;
    for (const auto& [n, v] : m.hits) hits[std::to_string(n)] = v;
    j["hits"] = std::move(hits);
    return j;
  };
  nlohmann::json j;
  j["format_version"] = 1;
  j["filtered"] = report.filtered;
  j["overall"] = metrics_json(report.overall);
  nlohmann::json per_class;
  for (const auto& [cls, m] : report.per_class) per_class[to_string(cls)] = metrics_json(m);
  j["per_class"] = std::move(per_class);
  return j.dump(2);
}

std::vector<RankedPrediction> predict_tails(const TuckerModel& model, Eigen::Index head,
                                            Eigen::Index relation,
                                            const PredictOptions& options) {
  Eigen::VectorXd conf = model.tail_confidences(head, relation);

  std::vector<Eigen::Index> candidates;
  candidates.reserve(static_cast<std::size_t>(conf.size()));
  for (Eigen::Index c = 0; c < conf.size(); ++c) {
    if (c == head || options.exclude.count(c)) continue;
    if (options.allowed_classes &&
        !options.allowed_classes->count(model.entity(c).entity_class))
      continue;
    candidates.push_back(c);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (conf(a) != conf(b)) return conf(a) > conf(b);
    return a < b;
  });
  if (candidates.size() > options.k) candidates.resize(options.k);

  std::vector<RankedPrediction> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.push_back({candidates[i], conf(candidates[i]), i + 1});
  }
  return out;
}

std::vector<IndexTriple> to_index_triples(const TuckerModel& model, const EntityStore& store,
                                          const std::vector<Triple>& triples,
                                          std::vector<Triple>* skipped) {
  std::vector<IndexTriple> out;
  out.reserve(triples.size());
  for (const Triple& t : triples) {
    const Entity& h = store.get(t.head);
    const Entity& tl = store.get(t.tail);
    auto hi = model.entity_index(h.canonical_name, h.entity_class);
    auto ti = model.entity_index(tl.canonical_name, tl.entity_class);
    auto ri = model.relation_index(t.relation);
    if (!hi || !ti || !ri) {
      if (!skipped)
        throw ContractError("triple endpoint or relation missing from model vocabulary: " +
                            h.canonical_name + " / " + tl.canonical_name);
      skipped->push_back(t);
      continue;
    }
    out.push_back({*hi, *ri, *ti});
  }
  return out;
}

}  // namespace ladder
