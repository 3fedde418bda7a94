#include "ladder/tucker_train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ladder/errors.hpp"
#include "ladder/rng.hpp"

namespace ladder {

namespace {
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

struct AdamState {
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;

  explicit AdamState(const Eigen::MatrixXd& shape)
      : m(Eigen::MatrixXd::Zero(shape.rows(), shape.cols())),
        v(Eigen::MatrixXd::Zero(shape.rows(), shape.cols())) {}

  void step(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad, double lr, int t) {
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(kAdamBeta1, t);
    const double c2 = 1.0 - std::pow(kAdamBeta2, t);
    param.noalias() -=
        (lr / c1) * m.cwiseQuotient(((v.array() / c2).sqrt() + kAdamEps).matrix());
  }
};

}  // namespace

// Owns the training loop; a friend of TuckerModel so it can fill the
// parameter matrices in place.
class TuckerTrainer {
 public:
  static TuckerModel run(const EntityStore& store, const std::vector<Triple>& triples,
                         const TuckerConfig& config) {
    config.validate();
    if (triples.empty()) throw ContractError("training needs at least one triple");

    TuckerModel model;
    model.config_ = config;

    // Vocabulary: exactly the entities and relations in the data, sorted so
    // the mapping is input-order independent.
    std::set<VocabEntry> vocab;
    std::set<RelationType> rels;
    for (const Triple& t : triples) {
      const Entity& h = store.get(t.head);
      const Entity& tl = store.get(t.tail);
      vocab.insert({h.canonical_name, h.entity_class});
      vocab.insert({tl.canonical_name, tl.entity_class});
      rels.insert(t.relation);
    }
    model.entities_.assign(vocab.begin(), vocab.end());
    model.relations_.assign(rels.begin(), rels.end());
    model.rebuild_lookup();

    const Eigen::Index n_e = model.entity_count();
    const Eigen::Index n_r = model.relation_count();
    const Eigen::Index de = config.entity_dim;
    const Eigen::Index dr = config.relation_dim;

    Rng rng(config.seed);
    auto init = [&](Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
      m.resize(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
          m(i, j) = rng.uniform(-config.init_scale, config.init_scale);
    };
    init(model.E_, n_e, de);
    init(model.R_, n_r, dr);
    init(model.W_, dr, de * de);

    // 1-N grouping: one training example per distinct (head, relation).
    std::map<std::pair<Eigen::Index, Eigen::Index>, std::set<Eigen::Index>> grouped;
    for (const Triple& t : triples) {
      const Entity& h = store.get(t.head);
      const Entity& tl = store.get(t.tail);
      Eigen::Index hi = *model.entity_index(h.canonical_name, h.entity_class);
      Eigen::Index ti = *model.entity_index(tl.canonical_name, tl.entity_class);
      Eigen::Index ri = *model.relation_index(t.relation);
      grouped[{hi, ri}].insert(ti);
    }
    struct Query {
      Eigen::Index head;
      Eigen::Index relation;
      std::vector<Eigen::Index> tails;
    };
    std::vector<Query> queries;
    queries.reserve(grouped.size());
    for (const auto& [key, tails] : grouped)
      queries.push_back({key.first, key.second, {tails.begin(), tails.end()}});

    AdamState adam_e(model.E_);
    AdamState adam_r(model.R_);
    AdamState adam_w(model.W_);
    int adam_t = 0;

    const double keep_in = 1.0 - config.input_dropout;
    const double keep_h1 = 1.0 - config.hidden_dropout1;
    const double keep_h2 = 1.0 - config.hidden_dropout2;
    const double smooth_floor = config.label_smoothing / static_cast<double>(n_e);

    std::vector<std::size_t> order(queries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    // Per-batch work areas.
    Eigen::MatrixXd X0, X3, GB, Rbatch, S, G;

    for (int iter = 0; iter < config.iterations; ++iter) {
      rng.shuffle(order);
      double epoch_loss = 0.0;
      std::size_t batches = 0;

      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(config.batch_size)) {
        const std::size_t b =
            std::min(order.size() - start, static_cast<std::size_t>(config.batch_size));
        const auto bi = static_cast<Eigen::Index>(b);

        X0.resize(bi, de);    // dropped-out head embeddings
        X3.resize(bi, de);    // projected vectors entering the score layer
        GB.resize(bi, de * de);  // d(loss)/d(B_r) per example, flattened
        Rbatch.resize(bi, dr);

        // Dropout masks are drawn per example in a fixed order (input, then
        // mixing matrix, then projection) so runs are reproducible.
        std::vector<Eigen::MatrixXd> masks1(b);
        std::vector<Eigen::VectorXd> masks_in(b), masks2(b);
        std::vector<Eigen::MatrixXd> mixed(b);

        auto draw_mask = [&](Eigen::Index size, double keep) {
          Eigen::VectorXd mask(size);
          for (Eigen::Index i = 0; i < size; ++i)
            mask(i) = rng.next_double() < keep ? 1.0 / keep : 0.0;
          return mask;
        };

        for (std::size_t e = 0; e < b; ++e) {
          const Query& q = queries[order[start + e]];
          const auto ei = static_cast<Eigen::Index>(e);

          masks_in[e] = draw_mask(de, keep_in);
          Eigen::VectorXd mask1_flat = draw_mask(de * de, keep_h1);
          masks1[e] = Eigen::Map<const RowMajor>(mask1_flat.data(), de, de);
          masks2[e] = draw_mask(de, keep_h2);

          X0.row(ei) = model.E_.row(q.head).cwiseProduct(masks_in[e].transpose());
          Rbatch.row(ei) = model.R_.row(q.relation);

          Eigen::RowVectorXd mixed_flat = model.R_.row(q.relation) * model.W_;
          Eigen::Map<const RowMajor> B(mixed_flat.data(), de, de);
          mixed[e] = B.cwiseProduct(masks1[e]);  // M = D1 .* B_r

          Eigen::VectorXd x2 = mixed[e].transpose() * X0.row(ei).transpose();
          X3.row(ei) = x2.cwiseProduct(masks2[e]).transpose();
        }

        S.noalias() = X3 * model.E_.transpose();  // b x n_e raw scores
        const double denom = static_cast<double>(b) * static_cast<double>(n_e);

        double batch_loss = 0.0;
        G.resize(bi, n_e);
        for (std::size_t e = 0; e < b; ++e) {
          const Query& q = queries[order[start + e]];
          const auto ei = static_cast<Eigen::Index>(e);
          std::set<Eigen::Index> tails(q.tails.begin(), q.tails.end());
          for (Eigen::Index t = 0; t < n_e; ++t) {
            const double y = (tails.count(t) ? 1.0 - config.label_smoothing : 0.0) + smooth_floor;
            const double p = logistic(S(ei, t));
            // Numerically stable BCE in terms of the raw score s:
            // -[y log p + (1-y) log(1-p)] = max(s,0) - y*s + log(1+exp(-|s|))
            const double s = S(ei, t);
            batch_loss += std::max(s, 0.0) - y * s + std::log1p(std::exp(-std::abs(s)));
            G(ei, t) = (p - y) / denom;
          }
        }
        batch_loss /= denom;
        if (!std::isfinite(batch_loss))
          throw TrainingDiverged("loss became non-finite", iter + 1);
        epoch_loss += batch_loss;
        ++batches;

        // Backward pass, mirroring the forward graph.
        Eigen::MatrixXd grad_E = G.transpose() * X3;  // score-layer term
        Eigen::MatrixXd dX3 = G * model.E_;           // b x de
        for (std::size_t e = 0; e < b; ++e) {
          const Query& q = queries[order[start + e]];
          const auto ei = static_cast<Eigen::Index>(e);
          Eigen::VectorXd dx2 = dX3.row(ei).transpose().cwiseProduct(masks2[e]);
          // x2 = M^T x0  =>  dM = x0 dx2^T, dx0 = M dx2
          Eigen::MatrixXd dM = X0.row(ei).transpose() * dx2.transpose();
          RowMajor dB = dM.cwiseProduct(masks1[e]);  // row-major vec matches W layout
          GB.row(ei) = Eigen::Map<const Eigen::RowVectorXd>(dB.data(), de * de);
          Eigen::VectorXd dx0 = mixed[e] * dx2;
          grad_E.row(q.head) += dx0.cwiseProduct(masks_in[e]).transpose();
        }

        Eigen::MatrixXd grad_W = Rbatch.transpose() * GB;  // dr x de^2
        Eigen::MatrixXd dRrows = GB * model.W_.transpose();  // b x dr
        Eigen::MatrixXd grad_R = Eigen::MatrixXd::Zero(n_r, dr);
        for (std::size_t e = 0; e < b; ++e) {
          const Query& q = queries[order[start + e]];
          grad_R.row(q.relation) += dRrows.row(static_cast<Eigen::Index>(e));
        }

        ++adam_t;
        adam_e.step(model.E_, grad_E, config.learning_rate, adam_t);
        adam_r.step(model.R_, grad_R, config.learning_rate, adam_t);
        adam_w.step(model.W_, grad_W, config.learning_rate, adam_t);
      }

      model.loss_trace_.push_back(batches ? epoch_loss / static_cast<double>(batches) : 0.0);
      if (!model.E_.allFinite() || !model.R_.allFinite() || !model.W_.allFinite())
        throw TrainingDiverged("parameters became non-finite", iter + 1);
    }
    return model;
  }
};

TuckerModel train_tucker(const EntityStore& store, const std::vector<Triple>& triples,
                         const TuckerConfig& config) {
  return TuckerTrainer::run(store, triples, config);
}

namespace tucker_detail {

Eigen::VectorXd smoothed_one_hot(Eigen::Index size, Eigen::Index tail, double label_smoothing) {
  Eigen::VectorXd y =
      Eigen::VectorXd::Constant(size, label_smoothing / static_cast<double>(size));
  y(tail) += 1.0 - label_smoothing;
  return y;
}

double loss_at(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
               const Eigen::VectorXd& targets) {
  Eigen::VectorXd s = model.score_all_tails(head, relation);
  if (s.size() != targets.size()) throw ContractError("target vector size mismatch");
  double loss = 0.0;
  for (Eigen::Index t = 0; t < s.size(); ++t) {
    loss += std::max(s(t), 0.0) - targets(t) * s(t) + std::log1p(std::exp(-std::abs(s(t))));
  }
  return loss / static_cast<double>(s.size());
}

Gradients analytic_gradients(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
                             const Eigen::VectorXd& targets) {
  const Eigen::Index de = model.config().entity_dim;
  const Eigen::MatrixXd& E = model.entity_embeddings();
  const Eigen::MatrixXd& R = model.relation_embeddings();
  const Eigen::MatrixXd& W = model.core();
  const auto n_e = static_cast<double>(E.rows());

  Gradients g;
  g.loss = loss_at(model, head, relation, targets);
  g.entity = Eigen::MatrixXd::Zero(E.rows(), E.cols());
  g.relation = Eigen::MatrixXd::Zero(R.rows(), R.cols());
  g.core = Eigen::MatrixXd::Zero(W.rows(), W.cols());

  Eigen::RowVectorXd mixed_flat = R.row(relation) * W;
  Eigen::Map<const RowMajor> B(mixed_flat.data(), de, de);

  Eigen::VectorXd x0 = E.row(head).transpose();
  Eigen::VectorXd x2 = B.transpose() * x0;
  Eigen::VectorXd s = E * x2;

  Eigen::VectorXd ds(s.size());
  for (Eigen::Index t = 0; t < s.size(); ++t) ds(t) = (logistic(s(t)) - targets(t)) / n_e;

  g.entity = ds * x2.transpose();  // score-layer outer products
  Eigen::VectorXd dx2 = E.transpose() * ds;
  Eigen::MatrixXd dB = x0 * dx2.transpose();
  g.entity.row(head) += (B * dx2).transpose();
  RowMajor dB_rm = dB;
  Eigen::Map<const Eigen::RowVectorXd> dB_flat(dB_rm.data(), de * de);
  g.core = R.row(relation).transpose() * dB_flat;
  g.relation.row(relation) = dB_flat * W.transpose();
  return g;
}

double max_gradient_gap(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
                        const Eigen::VectorXd& targets, const Gradients& candidate,
                        double epsilon) {
  if (!(epsilon > 0.0)) throw ContractError("epsilon must be positive");

  // Local mutable copy of the parameters; loss is recomputed from scratch
  // through a scratch model each probe.
  TuckerModel probe = model;

  struct Slot {
    Eigen::MatrixXd* param;
    const Eigen::MatrixXd* grad;
  };
  // const_cast is confined to this verification helper; probe is ours.
  Slot slots[3] = {
      {const_cast<Eigen::MatrixXd*>(&probe.entity_embeddings()), &candidate.entity},
      {const_cast<Eigen::MatrixXd*>(&probe.relation_embeddings()), &candidate.relation},
      {const_cast<Eigen::MatrixXd*>(&probe.core()), &candidate.core},
  };

  std::size_t total = 0;
  for (const Slot& s : slots) total += static_cast<std::size_t>(s.param->size());
  // Cap the probe count; beyond it, sample evenly.
  const std::size_t cap = 20000;
  const std::size_t stride = total > cap ? (total + cap - 1) / cap : 1;

  double worst = 0.0;
  std::size_t c = 0;
  for (const Slot& s : slots) {
    double* data = s.param->data();
    const double* gdata = s.grad->data();
    const auto count = static_cast<std::size_t>(s.param->size());
    for (std::size_t i = 0; i < count; ++i, ++c) {
      if (c % stride != 0) continue;
      const double saved = data[i];
      data[i] = saved + epsilon;
      const double up = loss_at(probe, head, relation, targets);
      data[i] = saved - epsilon;
      const double down = loss_at(probe, head, relation, targets);
      data[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double analytic = gdata[i];
      const double gap = std::abs(analytic - numeric) /
                         std::max({1.0, std::abs(analytic), std::abs(numeric)});
      worst = std::max(worst, gap);
    }
  }
  return worst;
}

}  // namespace tucker_detail

double gradient_check(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
                      Eigen::Index tail, double epsilon) {
  if (tail < 0 || tail >= model.entity_count()) throw ContractError("tail index out of range");
  Eigen::VectorXd targets = tucker_detail::smoothed_one_hot(
      model.entity_count(), tail, model.config().label_smoothing);
  tucker_detail::Gradients g =
      tucker_detail::analytic_gradients(model, head, relation, targets);
  return tucker_detail::max_gradient_gap(model, head, relation, targets, g, epsilon);
}

}  // namespace ladder
