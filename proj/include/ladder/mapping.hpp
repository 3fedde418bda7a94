#pragma once

#include <optional>
#include <span>
#include <string>

#include "ladder/catalog.hpp"
#include "ladder/embedding.hpp"

namespace ladder {

struct MappingConfig {
  // Weight of the title distance; the description distance gets the rest.
  double title_weight = 0.4;
  // A phrase maps only when its best weighted distance is below this.
  double threshold = 0.6;
};

// d = w * cos(phrase, title) + (1 - w) * cos(phrase, description).
// title_weight must lie in [0, 1].
double weighted_distance(const EmbeddingVector& phrase, const TechniqueEmbedding& technique,
                         double title_weight);

struct PhraseMapping {
  std::string technique_id;
  double distance;
};

// Nearest technique by weighted distance; nullopt when even the nearest is
// at or beyond the threshold (the phrase stays unmapped rather than being
// forced onto a bad match). Exact ties resolve to the smaller technique id.
// The catalog must be non-empty.
std::optional<PhraseMapping> map_phrase(const EmbeddingVector& phrase,
                                        std::span<const TechniqueEmbedding> catalog,
                                        const MappingConfig& config = {});

}  // namespace ladder
