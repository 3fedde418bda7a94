#include "ladder/embedding.hpp"

#include <cmath>
#include <sstream>

#include "ladder/text.hpp"

namespace ladder {

namespace {

// Distinct seeds keep the trigram and unigram feature families from
// colliding systematically. Fixed forever; changing them would silently
// re-map every stored phrase vector.
constexpr std::uint64_t kTrigramSeed = 0x243F6A8885A308D3ULL;
constexpr std::uint64_t kUnigramSeed = 0x13198A2E03707344ULL;

std::string normalize_text(std::string_view text) {
  std::string lowered = to_lower(text);
  std::vector<std::string> words = split_whitespace(lowered);
  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

HashedEmbeddingProvider::HashedEmbeddingProvider(Eigen::Index dim) : dim_(dim) {
  if (dim < 8) throw ContractError("embedding dimension must be at least 8");
}

EmbeddingVector HashedEmbeddingProvider::embed(std::string_view text) const {
  std::string norm = normalize_text(text);
  if (norm.empty()) throw ContractError("cannot embed empty or whitespace-only text");

  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  const auto n = static_cast<std::uint64_t>(dim_);

  // Character trigrams over the padded string catch morphology; word
  // unigrams catch identity. Counts, not indicators, so repeated terms
  // weigh more.
  std::string padded = " " + norm + " ";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::uint64_t h = fnv1a64(std::string_view(padded).substr(i, 3), kTrigramSeed);
    v[static_cast<Eigen::Index>(h % n)] += 1.0;
  }
  for (const std::string& w : split_whitespace(norm)) {
    std::uint64_t h = fnv1a64(w, kUnigramSeed);
    v[static_cast<Eigen::Index>(h % n)] += 1.0;
  }

  v /= v.norm();
  return EmbeddingVector(std::move(v));
}

EmbeddingLoadResult load_embeddings(std::istream& in) {
  EmbeddingLoadResult out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty() || raw[0] == '#') continue;

    auto reject = [&](const std::string& reason) { out.rejections.push_back({line_no, reason}); };

    std::vector<std::string> f = split(raw, '\t');
    if (f.size() != 2) {
      reject("expected 'name<TAB>components'");
      continue;
    }
    std::string name = trim(f[0]);
    if (name.empty()) {
      reject("empty name");
      continue;
    }
    if (out.vectors.count(name)) {
      reject("duplicate name '" + name + "'");
      continue;
    }
    std::vector<std::string> comps = split_whitespace(f[1]);
    if (comps.empty()) {
      reject("no components");
      continue;
    }
    if (out.dimension != 0 && static_cast<Eigen::Index>(comps.size()) != out.dimension) {
      reject("dimension " + std::to_string(comps.size()) + " disagrees with " +
             std::to_string(out.dimension));
      continue;
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(comps.size()));
    bool ok = true;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      try {
        std::size_t used = 0;
        v[static_cast<Eigen::Index>(i)] = std::stod(comps[i], &used);
        if (used != comps[i].size()) ok = false;
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) break;
    }
    if (!ok || !v.allFinite()) {
      reject("non-numeric or non-finite component");
      continue;
    }
    if (v.isZero(0.0)) {
      reject("zero vector");
      continue;
    }
    if (out.dimension == 0) out.dimension = v.size();
    out.vectors.emplace(name, EmbeddingVector(std::move(v)));
  }
  return out;
}

}  // namespace ladder
