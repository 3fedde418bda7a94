#include "ladder/tucker.hpp"

#include <nlohmann/json.hpp>

#include "ladder/errors.hpp"
#include "ladder/text.hpp"

namespace ladder {

namespace {
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

void TuckerConfig::validate() const {
  if (entity_dim < 1) throw ContractError("entity_dim must be positive");
  if (relation_dim < 1) throw ContractError("relation_dim must be positive");
  if (batch_size < 1) throw ContractError("batch_size must be positive");
  if (iterations < 0) throw ContractError("iterations must be non-negative");
  if (!(learning_rate > 0.0)) throw ContractError("learning_rate must be positive");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0))
    throw ContractError("label_smoothing must lie in [0, 1)");
  for (double p : {input_dropout, hidden_dropout1, hidden_dropout2}) {
    if (!(p >= 0.0 && p < 1.0)) throw ContractError("dropout rates must lie in [0, 1)");
  }
  if (!(init_scale > 0.0)) throw ContractError("init_scale must be positive");
}

std::optional<Eigen::Index> TuckerModel::entity_index(const std::string& name,
                                                      EntityClass cls) const {
  auto it = entity_lookup_.find({name, cls});
  if (it == entity_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<Eigen::Index> TuckerModel::relation_index(RelationType r) const {
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    if (relations_[i] == r) return static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

const VocabEntry& TuckerModel::entity(Eigen::Index i) const {
  if (i < 0 || i >= entity_count()) throw ContractError("entity index out of range");
  return entities_[static_cast<std::size_t>(i)];
}

void TuckerModel::rebuild_lookup() {
  entity_lookup_.clear();
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    entity_lookup_[{entities_[i].name, entities_[i].entity_class}] =
        static_cast<Eigen::Index>(i);
  }
}

void TuckerModel::check_indices(Eigen::Index head, Eigen::Index relation,
                                Eigen::Index tail) const {
  if (head < 0 || head >= entity_count()) throw ContractError("head index out of range");
  if (relation < 0 || relation >= relation_count())
    throw ContractError("relation index out of range");
  if (tail < 0 || tail >= entity_count()) throw ContractError("tail index out of range");
}

double TuckerModel::score(Eigen::Index head, Eigen::Index relation, Eigen::Index tail) const {
  check_indices(head, relation, tail);
  const Eigen::Index d = config_.entity_dim;
  Eigen::RowVectorXd mixed = R_.row(relation) * W_;  // 1 x d^2
  Eigen::Map<const RowMajor> B(mixed.data(), d, d);
  return E_.row(head) * B * E_.row(tail).transpose();
}

Eigen::VectorXd TuckerModel::score_all_tails(Eigen::Index head, Eigen::Index relation) const {
  check_indices(head, relation, 0);
  const Eigen::Index d = config_.entity_dim;
  Eigen::RowVectorXd mixed = R_.row(relation) * W_;
  Eigen::Map<const RowMajor> B(mixed.data(), d, d);
  Eigen::VectorXd projected = B.transpose() * E_.row(head).transpose();
  return E_ * projected;
}

Eigen::VectorXd TuckerModel::tail_confidences(Eigen::Index head, Eigen::Index relation) const {
  Eigen::VectorXd s = score_all_tails(head, relation);
  return s.unaryExpr([](double x) { return logistic(x); });
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, Eigen::Index expect_cols,
                                 const char* what) {
  if (!rows.is_array()) throw ParseError(std::string(what) + ": expected array", 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), expect_cols);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != expect_cols)
      throw ParseError(std::string(what) + ": row width mismatch", 0);
    Eigen::Index j = 0;
    for (const auto& v : row) m(i, j++) = v.get<double>();
    ++i;
  }
  return m;
}

}  // namespace

std::string TuckerModel::serialize() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["config"] = {{"entity_dim", config_.entity_dim},
                 {"relation_dim", config_.relation_dim},
                 {"batch_size", config_.batch_size},
                 {"iterations", config_.iterations},
                 {"learning_rate", config_.learning_rate},
                 {"label_smoothing", config_.label_smoothing},
                 {"input_dropout", config_.input_dropout},
                 {"hidden_dropout1", config_.hidden_dropout1},
                 {"hidden_dropout2", config_.hidden_dropout2},
                 {"init_scale", config_.init_scale},
                 {"seed", config_.seed}};
  nlohmann::json ents = nlohmann::json::array();
  for (const VocabEntry& e : entities_)
    ents.push_back({{"name", e.name}, {"class", to_string(e.entity_class)}});
  j["entities"] = std::move(ents);
  nlohmann::json rels = nlohmann::json::array();
  for (RelationType r : relations_) rels.push_back(to_string(r));
  j["relations"] = std::move(rels);
  j["entity_embeddings"] = matrix_to_json(E_);
  j["relation_embeddings"] = matrix_to_json(R_);
  j["core"] = matrix_to_json(W_);
  j["loss_trace"] = loss_trace_;
  return j.dump();
}

TuckerModel TuckerModel::deserialize(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model JSON: ") + e.what(), 0);
  }
  if (j.value("format_version", 0) != 1)
    throw ParseError("model JSON: unsupported format_version", 0);

  TuckerModel m;
  const auto& c = j.at("config");
  m.config_.entity_dim = c.at("entity_dim").get<Eigen::Index>();
  m.config_.relation_dim = c.at("relation_dim").get<Eigen::Index>();
  m.config_.batch_size = c.at("batch_size").get<int>();
  m.config_.iterations = c.at("iterations").get<int>();
  m.config_.learning_rate = c.at("learning_rate").get<double>();
  m.config_.label_smoothing = c.at("label_smoothing").get<double>();
  m.config_.input_dropout = c.at("input_dropout").get<double>();
  m.config_.hidden_dropout1 = c.at("hidden_dropout1").get<double>();
  m.config_.hidden_dropout2 = c.at("hidden_dropout2").get<double>();
  m.config_.init_scale = c.at("init_scale").get<double>();
  m.config_.seed = c.at("seed").get<std::uint64_t>();
  m.config_.validate();

  for (const auto& e : j.at("entities")) {
    auto cls = entity_class_from(e.at("class").get<std::string>());
    if (!cls) throw ParseError("model JSON: unknown entity class", 0);
    m.entities_.push_back({e.at("name").get<std::string>(), *cls});
  }
  for (const auto& r : j.at("relations")) {
    auto rel = relation_from(r.get<std::string>());
    if (!rel) throw ParseError("model JSON: unknown relation", 0);
    m.relations_.push_back(*rel);
  }
  m.E_ = matrix_from_json(j.at("entity_embeddings"), m.config_.entity_dim, "entity_embeddings");
  if (m.E_.rows() != static_cast<Eigen::Index>(m.entities_.size()))
    throw ParseError("model JSON: entity embedding count mismatch", 0);
  m.R_ = matrix_from_json(j.at("relation_embeddings"), m.config_.relation_dim,
                          "relation_embeddings");
  if (m.R_.rows() != static_cast<Eigen::Index>(m.relations_.size()))
    throw ParseError("model JSON: relation embedding count mismatch", 0);
  m.W_ = matrix_from_json(j.at("core"), m.config_.entity_dim * m.config_.entity_dim, "core");
  if (m.W_.rows() != m.config_.relation_dim)
    throw ParseError("model JSON: core row count mismatch", 0);
  if (j.contains("loss_trace")) m.loss_trace_ = j.at("loss_trace").get<std::vector<double>>();
  m.rebuild_lookup();
  return m;
}

void TuckerModel::save(const std::filesystem::path& path) const {
  write_file(path, serialize() + "\n");
}

TuckerModel TuckerModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

}  // namespace ladder
