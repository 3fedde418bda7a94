#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ladder/errors.hpp"

namespace ladder {

// A finite, nonzero dense vector representing a piece of text.
class EmbeddingVector {
 public:
  explicit EmbeddingVector(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() == 0) throw ContractError("embedding must be non-empty");
    if (!values_.allFinite()) throw ContractError("embedding must be finite");
    if (values_.isZero(0.0)) throw ContractError("embedding must be nonzero");
  }

  Eigen::Index dimension() const { return values_.size(); }
  const Eigen::VectorXd& values() const { return values_; }

 private:
  Eigen::VectorXd values_;
};

// cos(u, v) = 1 - u.v / (|u| |v|), in [0, 2]; 0 means same direction.
// Both arguments must be nonzero and of equal dimension.
template <typename DerivedU, typename DerivedV>
double cosine_distance(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
  if (u.size() != v.size())
    throw ContractError("cosine_distance dimension mismatch: " + std::to_string(u.size()) +
                        " vs " + std::to_string(v.size()));
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw ContractError("cosine_distance requires nonzero vectors");
  return 1.0 - u.dot(v) / (nu * nv);
}

inline double cosine_distance(const EmbeddingVector& u, const EmbeddingVector& v) {
  return cosine_distance(u.values(), v.values());
}

// Text to vector. Implementations must be deterministic: equal text, equal
// vector.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Eigen::Index dimension() const = 0;
  // Throws ContractError when text is empty or whitespace-only.
  virtual EmbeddingVector embed(std::string_view text) const = 0;
};

// Built-in deterministic provider: hashed character trigrams plus word
// unigrams over lowercased, whitespace-collapsed text, L2-normalized.
// Self-contained so the toolkit runs without model downloads; any provider
// with a richer notion of similarity can be swapped in through the interface.
class HashedEmbeddingProvider final : public EmbeddingProvider {
 public:
  static constexpr Eigen::Index kDefaultDim = 256;

  explicit HashedEmbeddingProvider(Eigen::Index dim = kDefaultDim);

  Eigen::Index dimension() const override { return dim_; }
  EmbeddingVector embed(std::string_view text) const override;

 private:
  Eigen::Index dim_;
};

// Loads "name <TAB> v1 v2 ... vd" lines into named vectors, for plugging in
// externally computed embeddings. Lines with the wrong arity, non-numeric
// components, duplicate names, or a dimension disagreeing with the first
// line are reported and skipped.
struct EmbeddingLoadResult {
  std::map<std::string, EmbeddingVector> vectors;
  Eigen::Index dimension = 0;
  struct Rejection {
    std::size_t line;
    std::string reason;
  };
  std::vector<Rejection> rejections;
};

EmbeddingLoadResult load_embeddings(std::istream& in);

}  // namespace ladder
