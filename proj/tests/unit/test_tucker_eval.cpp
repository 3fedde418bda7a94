#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "ladder/errors.hpp"
#include "ladder/rng.hpp"
#include "ladder/tucker_eval.hpp"
#include "test_tucker_util.hpp"

using namespace ladder;

namespace {

// Rank recomputed straight from the scores: pessimistic on ties, excluded
// entities never compete, the true tail always does.
std::size_t brute_rank(const TuckerModel& model, Eigen::Index h, Eigen::Index r, Eigen::Index t,
                       const std::set<Eigen::Index>& exclude) {
  Eigen::VectorXd s = model.score_all_tails(h, r);
  std::size_t rank = 1;
  for (Eigen::Index c = 0; c < s.size(); ++c) {
    if (c == t || exclude.count(c)) continue;
    if (s(c) >= s(t)) ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("rank_of matches the brute-force definition") {
  auto model = testing::small_model(10);
  for (Eigen::Index h = 0; h < model.entity_count(); ++h) {
    for (Eigen::Index r = 0; r < model.relation_count(); ++r) {
      for (Eigen::Index t = 0; t < model.entity_count(); ++t) {
        CHECK(rank_of(model, h, r, t) == brute_rank(model, h, r, t, {}));
      }
    }
  }

  std::set<Eigen::Index> exclude = {0, 2, 5};
  CHECK(rank_of(model, 1, 0, 6, exclude) == brute_rank(model, 1, 0, 6, exclude));
  // Excluding the tail itself must not remove it from competition.
  std::set<Eigen::Index> with_self = {6};
  CHECK(rank_of(model, 1, 0, 6, with_self) >= 1);
}

TEST_CASE("metrics_from_ranks computes the worked example") {
  ClassMetrics m = metrics_from_ranks({1, 2, 4}, {3, 10, 30});
  CHECK(m.count == 3);
  CHECK(m.mrr == doctest::Approx((1.0 + 0.5 + 0.25) / 3.0).epsilon(1e-15));
  CHECK(m.hits.at(3) == doctest::Approx(2.0 / 3.0));
  CHECK(m.hits.at(10) == doctest::Approx(1.0));
  CHECK(m.hits.at(30) == doctest::Approx(1.0));
}

TEST_CASE("evaluate agrees with rank-by-rank recomputation") {
  auto model = testing::small_model(25);
  auto corpus = testing::small_corpus();
  auto all = to_index_triples(model, corpus.store, corpus.triples);
  REQUIRE(all.size() == corpus.triples.size());

  // Hold out two triples, treat the rest plus them as known truth.
  std::vector<IndexTriple> test = {all[1], all[3]};
  const std::vector<IndexTriple>& known = all;

  for (bool filtered : {true, false}) {
    CAPTURE(filtered);
    EvalOptions opt;
    opt.filtered = filtered;
    auto report = evaluate(model, test, known, opt);
    CHECK(report.filtered == filtered);

    std::vector<std::size_t> ranks;
    for (const IndexTriple& q : test) {
      std::set<Eigen::Index> exclude;
      if (filtered) {
        for (const IndexTriple& k : known) {
          if (k.head == q.head && k.relation == q.relation && k.tail != q.tail) {
            exclude.insert(k.tail);
          }
        }
      }
      ranks.push_back(brute_rank(model, q.head, q.relation, q.tail, exclude));
    }
    ClassMetrics expect = metrics_from_ranks(ranks, opt.hits_at);
    CHECK(report.overall.count == expect.count);
    CHECK(report.overall.mrr == doctest::Approx(expect.mrr).epsilon(1e-12));
    for (int n : opt.hits_at) {
      CHECK(report.overall.hits.at(n) == doctest::Approx(expect.hits.at(n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("filtering can only improve a rank") {
  auto model = testing::small_model(25);
  auto corpus = testing::small_corpus();
  auto all = to_index_triples(model, corpus.store, corpus.triples);

  EvalOptions raw;
  raw.filtered = false;
  EvalOptions filtered;
  filtered.filtered = true;
  auto raw_report = evaluate(model, all, all, raw);
  auto filt_report = evaluate(model, all, all, filtered);
  CHECK(filt_report.overall.mrr >= raw_report.overall.mrr - 1e-12);

  // Cerberus uses two techniques; hiding the competing true tail must
  // strictly improve the weaker one's rank once the model has learned both.
  auto h = model.entity_index("Cerberus", EntityClass::Malware);
  auto r = model.relation_index(RelationType::Uses);
  auto t1 = model.entity_index("T1401", EntityClass::AttackPattern);
  auto t2 = model.entity_index("T1402", EntityClass::AttackPattern);
  REQUIRE((h && r && t1 && t2));
  std::size_t raw_rank = rank_of(model, *h, *r, *t1);
  std::size_t filt_rank = rank_of(model, *h, *r, *t1, {*t2});
  CHECK(filt_rank <= raw_rank);
}

TEST_CASE("per-class metrics partition the test set by tail class") {
  auto model = testing::small_model(25);
  auto corpus = testing::small_corpus();
  auto all = to_index_triples(model, corpus.store, corpus.triples);
  auto report = evaluate(model, all, all, {});

  std::size_t total = 0;
  for (const auto& [cls, metrics] : report.per_class) total += metrics.count;
  CHECK(total == report.overall.count);
  CHECK(report.per_class.count(EntityClass::AttackPattern) == 1);
  CHECK(report.per_class.at(EntityClass::AttackPattern).count == 5);
  CHECK(report.per_class.at(EntityClass::OS).count == 3);
  CHECK(report.per_class.at(EntityClass::MalwareType).count == 2);
}

TEST_CASE("hits are monotone in n on random rank lists") {
  Rng rng(99);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::size_t> ranks;
    int n = 1 + int(rng.bounded(40));
    for (int i = 0; i < n; ++i) ranks.push_back(1 + rng.bounded(60));
    auto m = metrics_from_ranks(ranks, {3, 10, 30});
    CHECK(m.hits.at(3) <= m.hits.at(10));
    CHECK(m.hits.at(10) <= m.hits.at(30));
    CHECK(m.mrr > 0.0);
    CHECK(m.mrr <= 1.0);
  }
}

TEST_CASE("predictions rank by confidence and respect the filters") {
  auto model = testing::small_model(25);
  auto h = model.entity_index("Ghost", EntityClass::Malware);
  auto r = model.relation_index(RelationType::Uses);
  REQUIRE((h && r));

  PredictOptions opt;
  opt.k = 100;
  auto preds = predict_tails(model, *h, *r, opt);
  CHECK(preds.size() == std::size_t(model.entity_count() - 1));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    CHECK(preds[i].tail != *h);
    CHECK(preds[i].rank == i + 1);
    CHECK(preds[i].confidence > 0.0);
    CHECK(preds[i].confidence < 1.0);
    if (i > 0) {
      bool ordered = preds[i - 1].confidence > preds[i].confidence ||
                     (preds[i - 1].confidence == preds[i].confidence &&
                      preds[i - 1].tail < preds[i].tail);
      CHECK(ordered);
    }
  }

  PredictOptions top2 = opt;
  top2.k = 2;
  CHECK(predict_tails(model, *h, *r, top2).size() == 2);

  PredictOptions classed = opt;
  classed.allowed_classes = std::set<EntityClass>{EntityClass::AttackPattern};
  auto ap_only = predict_tails(model, *h, *r, classed);
  CHECK(ap_only.size() == 3);
  for (const auto& p : ap_only) {
    CHECK(model.entity(p.tail).entity_class == EntityClass::AttackPattern);
  }

  PredictOptions excluded = classed;
  excluded.exclude = {ap_only[0].tail};
  auto rest = predict_tails(model, *h, *r, excluded);
  CHECK(rest.size() == 2);
  for (const auto& p : rest) CHECK(p.tail != ap_only[0].tail);
}

TEST_CASE("to_index_triples maps vocabulary and reports strays") {
  auto model = testing::small_model(2);
  auto corpus = testing::small_corpus();

  EntityId stray = corpus.store.intern("Unseen", EntityClass::Malware);
  EntityId t1401 = *corpus.store.find("T1401", EntityClass::AttackPattern);
  auto triples = corpus.triples;
  triples.push_back({stray, RelationType::Uses, t1401, {}, {}});

  std::vector<Triple> skipped;
  auto idx = to_index_triples(model, corpus.store, triples, &skipped);
  CHECK(idx.size() == corpus.triples.size());
  REQUIRE(skipped.size() == 1);
  CHECK(skipped[0].head == stray);

  CHECK_THROWS_AS(to_index_triples(model, corpus.store, triples), ContractError);
}

TEST_CASE("the report serializes to well-formed JSON") {
  auto model = testing::small_model(10);
  auto corpus = testing::small_corpus();
  auto all = to_index_triples(model, corpus.store, corpus.triples);
  auto report = evaluate(model, all, all, {});

  auto doc = nlohmann::json::parse(eval_report_to_json(report));
  CHECK(doc.at("filtered").get<bool>() == true);
  CHECK(doc.at("overall").at("mrr").get<double>() ==
        doctest::Approx(report.overall.mrr).epsilon(1e-12));
  CHECK(doc.at("overall").at("count").get<std::size_t>() == report.overall.count);
  CHECK(doc.at("per_class").contains("AttackPattern"));
  CHECK(doc.at("overall").at("hits").contains("3"));
}
