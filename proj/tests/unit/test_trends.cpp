#include <cmath>
#include <vector>

#include "doctest.h"
#include "ladder/rng.hpp"
#include "ladder/trends.hpp"

using namespace ladder;

TEST_CASE("the single-year worked example holds exactly") {
  std::vector<TechniqueObservation> obs = {
      {"Anubis", "T1412", 2019},
      {"Cerberus", "T1412", 2019},
      {"Ghost", "T1513", 2019},
  };
  auto report = trend_analysis(obs);
  REQUIRE(report.normalized.count(2019) == 1);
  CHECK(report.normalized[2019]["T1412"] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(report.normalized[2019]["T1513"] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(report.observations_per_year[2019] == 3);
  CHECK(report.families_per_year[2019] == 3);
  CHECK(report.family_share[2019]["T1412"] == doctest::Approx(2.0 / 3.0));
  CHECK(report.family_share[2019]["T1513"] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("a pair counts once, in its earliest year") {
  std::vector<TechniqueObservation> obs = {
      {"Anubis", "T1412", 2021},
      {"Anubis", "T1412", 2019},
      {"Anubis", "T1412", 2020},
      {"Cerberus", "T1513", 2020},
  };
  auto report = trend_analysis(obs);
  CHECK(report.observations_per_year[2019] == 1);
  CHECK(report.observations_per_year.count(2021) == 0);
  CHECK(report.normalized[2019]["T1412"] == doctest::Approx(1.0));
  CHECK(report.normalized[2020]["T1513"] == doctest::Approx(1.0));
  CHECK(report.normalized[2020].count("T1412") == 0);
}

TEST_CASE("family share counts distinct families, not observations") {
  std::vector<TechniqueObservation> obs = {
      {"A", "T1001", 2020},
      {"A", "T1002", 2020},
      {"B", "T1001", 2020},
  };
  auto report = trend_analysis(obs);
  // Two families total; T1001 used by both, T1002 by one.
  CHECK(report.families_per_year[2020] == 2);
  CHECK(report.family_share[2020]["T1001"] == doctest::Approx(1.0));
  CHECK(report.family_share[2020]["T1002"] == doctest::Approx(0.5));
  // Shares need not sum to 1.
  CHECK(report.family_share[2020]["T1001"] + report.family_share[2020]["T1002"] > 1.0);
}

TEST_CASE("normalized counts sum to one per year on random input") {
  Rng rng(42);
  for (int round = 0; round < 20; ++round) {
    std::vector<TechniqueObservation> obs;
    int n = 10 + int(rng.bounded(190));
    for (int i = 0; i < n; ++i) {
      obs.push_back({"fam" + std::to_string(rng.bounded(12)),
                     "T10" + std::to_string(10 + rng.bounded(80)),
                     2015 + int(rng.bounded(8))});
    }
    auto report = trend_analysis(obs);
    REQUIRE_FALSE(report.normalized.empty());
    for (const auto& [year, shares] : report.normalized) {
      double sum = 0.0;
      for (const auto& [id, share] : shares) {
        CHECK(share > 0.0);
        sum += share;
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("empty input yields an empty report") {
  auto report = trend_analysis({});
  CHECK(report.normalized.empty());
  CHECK(report.family_share.empty());
  CHECK(report.observations_per_year.empty());
  CHECK(report.families_per_year.empty());
}
