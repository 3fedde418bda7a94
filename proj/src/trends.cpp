#include "ladder/trends.hpp"

#include <set>

namespace ladder {

TrendReport trend_analysis(std::span<const TechniqueObservation> observations) {
  // Dedupe to the earliest sighting of each (malware, technique) pair.
  std::map<std::pair<std::string, std::string>, int> earliest;
  for (const TechniqueObservation& o : observations) {
    auto key = std::make_pair(o.malware, o.technique_id);
    auto it = earliest.find(key);
    if (it == earliest.end() || o.year < it->second) earliest[key] = o.year;
  }

  std::map<int, std::map<std::string, std::size_t>> counts;  // year -> technique -> n
  std::map<int, std::set<std::string>> families;             // year -> malware set
  std::map<int, std::map<std::string, std::set<std::string>>> users;  // year -> tech -> malware

  for (const auto& [key, year] : earliest) {
    counts[year][key.second] += 1;
    families[year].insert(key.first);
    users[year][key.second].insert(key.first);
  }

  TrendReport report;
  for (const auto& [year, per_tech] : counts) {
    std::size_t total = 0;
    for (const auto& [tech, n] : per_tech) total += n;
    report.observations_per_year[year] = total;
    for (const auto& [tech, n] : per_tech) {
      report.normalized[year][tech] =
          static_cast<double>(n) / static_cast<double>(total);
    }
  }
  for (const auto& [year, fams] : families) {
    report.families_per_year[year] = fams.size();
    for (const auto& [tech, using_fams] : users[year]) {
      report.family_share[year][tech] =
          static_cast<double>(using_fams.size()) / static_cast<double>(fams.size());
    }
  }
  return report;
}

}  // namespace ladder
