#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

namespace ladder {

// One malware family observed using one technique in one year.
struct TechniqueObservation {
  std::string malware;
  std::string technique_id;
  int year = 0;
};

struct TrendReport {
  // normalized[year][technique] = observations of the technique that year /
  // all technique observations that year. Sums to 1 per year.
  std::map<int, std::map<std::string, double>> normalized;
  // family_share[year][technique] = distinct families using the technique
  // that year / distinct families observed that year. Does not sum to 1.
  std::map<int, std::map<std::string, double>> family_share;
  // Raw denominators, for reporting.
  std::map<int, std::size_t> observations_per_year;
  std::map<int, std::size_t> families_per_year;
};

// Aggregates technique usage over time. A (malware, technique) pair counts
// once, in the earliest year it was seen, so re-reporting of an old
// capability does not inflate later years.
TrendReport trend_analysis(std::span<const TechniqueObservation> observations);

}  // namespace ladder
