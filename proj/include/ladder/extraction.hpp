#pragma once

#include <cstddef>
#include <set>
#include <string>

namespace ladder {

// Set-level precision/recall/F1 for an extraction task.
struct ExtractionScore {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;  // tp / (tp + fp), 0 when the denominator is 0
  double recall = 0.0;     // tp / (tp + fn), 0 when the denominator is 0
  double f1 = 0.0;         // 2PR / (P + R), 0 when P + R == 0
};

ExtractionScore score_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

ExtractionScore score_extraction(const std::set<std::string>& predicted,
                                 const std::set<std::string>& gold);

}  // namespace ladder
