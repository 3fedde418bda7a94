#include "ladder/mapping.hpp"

#include "ladder/errors.hpp"

namespace ladder {

double weighted_distance(const EmbeddingVector& phrase, const TechniqueEmbedding& technique,
                         double title_weight) {
  if (!(title_weight >= 0.0 && title_weight <= 1.0))
    throw ContractError("title_weight must be in [0, 1]");
  return title_weight * cosine_distance(phrase, technique.title) +
         (1.0 - title_weight) * cosine_distance(phrase, technique.description);
}

std::optional<PhraseMapping> map_phrase(const EmbeddingVector& phrase,
                                        std::span<const TechniqueEmbedding> catalog,
                                        const MappingConfig& config) {
  if (catalog.empty()) throw ContractError("map_phrase requires a non-empty catalog");

  const TechniqueEmbedding* best = nullptr;
  double best_distance = 0.0;
  for (const TechniqueEmbedding& t : catalog) {
    double d = weighted_distance(phrase, t, config.title_weight);
    if (!best || d < best_distance ||
        (d == best_distance && t.technique_id < best->technique_id)) {
      best = &t;
      best_distance = d;
    }
  }
  if (best_distance >= config.threshold) return std::nullopt;
  return PhraseMapping{best->technique_id, best_distance};
}

}  // namespace ladder
