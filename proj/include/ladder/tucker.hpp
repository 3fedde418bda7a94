#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ladder/ontology.hpp"

namespace ladder {

// Hyperparameters for the trilinear link predictor. Iterations are full
// passes over the grouped training queries ("epochs"). Updates use Adam with
// the given initial learning rate; parameters start uniform in
// [-init_scale, init_scale]. The three dropout rates follow the usual
// layering for this architecture: one on the head embedding, one on the
// relation-specific mixing matrix, one on the projected vector.
struct TuckerConfig {
  Eigen::Index entity_dim = 50;
  Eigen::Index relation_dim = 50;
  int batch_size = 64;
  int iterations = 1000;
  double learning_rate = 0.001;
  double label_smoothing = 0.1;
  double input_dropout = 0.2;
  double hidden_dropout1 = 0.2;
  double hidden_dropout2 = 0.3;
  double init_scale = 0.1;
  std::uint64_t seed = 1;

  void validate() const;  // throws ContractError on out-of-range values
};

// Entity vocabulary entry; identity is the (name, class) pair, matching
// EntityStore.
struct VocabEntry {
  std::string name;
  EntityClass entity_class = EntityClass::Malware;

  friend bool operator==(const VocabEntry&, const VocabEntry&) = default;
  friend bool operator<(const VocabEntry& a, const VocabEntry& b) {
    if (a.entity_class != b.entity_class) return a.entity_class < b.entity_class;
    return a.name < b.name;
  }
};

// A trained (or freshly initialized) factorization:
//
//   score(h, r, t) = e_h^T B_r e_t,  B_r = reshape(w_r^T W)
//
// with a shared core W mixing a d_e head embedding, a d_r relation
// embedding, and a d_e tail embedding. logistic(score) is the model's
// confidence that the triple holds.
class TuckerModel {
 public:
  TuckerModel() = default;

  const TuckerConfig& config() const { return config_; }

  Eigen::Index entity_count() const { return static_cast<Eigen::Index>(entities_.size()); }
  Eigen::Index relation_count() const { return static_cast<Eigen::Index>(relations_.size()); }

  const std::vector<VocabEntry>& entities() const { return entities_; }
  const std::vector<RelationType>& relations() const { return relations_; }

  std::optional<Eigen::Index> entity_index(const std::string& name, EntityClass cls) const;
  std::optional<Eigen::Index> relation_index(RelationType r) const;
  const VocabEntry& entity(Eigen::Index i) const;

  // Raw trilinear score; dropout never applies here.
  double score(Eigen::Index head, Eigen::Index relation, Eigen::Index tail) const;

  // Scores against every entity as tail, one pass.
  Eigen::VectorXd score_all_tails(Eigen::Index head, Eigen::Index relation) const;

  // logistic(score) for every tail; each component lies strictly in (0, 1).
  Eigen::VectorXd tail_confidences(Eigen::Index head, Eigen::Index relation) const;

  // Mean training loss per iteration, in order; empty for an untrained model.
  const std::vector<double>& loss_trace() const { return loss_trace_; }

  void save(const std::filesystem::path& path) const;
  static TuckerModel load(const std::filesystem::path& path);

  std::string serialize() const;
  static TuckerModel deserialize(std::string_view json_text);

  // Parameter access for the trainer and for gradient verification.
  const Eigen::MatrixXd& entity_embeddings() const { return E_; }
  const Eigen::MatrixXd& relation_embeddings() const { return R_; }
  // Core tensor flattened to relation_dim rows of entity_dim^2 values;
  // entry (k, i * entity_dim + j) couples relation dim k, head dim i,
  // tail dim j.
  const Eigen::MatrixXd& core() const { return W_; }

 private:
  friend class TuckerTrainer;

  TuckerConfig config_;
  std::vector<VocabEntry> entities_;
  std::vector<RelationType> relations_;
  std::map<std::pair<std::string, EntityClass>, Eigen::Index> entity_lookup_;
  Eigen::MatrixXd E_;  // entity_count x entity_dim
  Eigen::MatrixXd R_;  // relation_count x relation_dim
  Eigen::MatrixXd W_;  // relation_dim x entity_dim^2
  std::vector<double> loss_trace_;

  void rebuild_lookup();
  void check_indices(Eigen::Index head, Eigen::Index relation, Eigen::Index tail) const;
};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace ladder
