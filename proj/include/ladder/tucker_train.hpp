#pragma once

#include <span>
#include <vector>

#include "ladder/tucker.hpp"

namespace ladder {

// Trains from scratch on the given triples. The vocabulary is exactly the
// set of entities and relations occurring in `triples` (classes looked up in
// `store`), sorted, so equal inputs give equal vocabularies. Training is
// 1-N: queries (h, r) score against every entity, with the true tails as
// positive labels, label smoothing, and binary cross-entropy averaged over
// the batch and the vocabulary.
//
// Deterministic: same store, triples, and config give a bitwise-identical
// model. Throws TrainingDiverged if the loss leaves the finite range.
TuckerModel train_tucker(const EntityStore& store, const std::vector<Triple>& triples,
                         const TuckerConfig& config);

// Compares analytic gradients of the 1-N loss for the single query derived
// from (head, relation) with tail as the positive, against central finite
// differences. Returns the maximum discrepancy |ga - gn| / max(1, |ga|, |gn|)
// over the checked coordinates (all of them up to ~20k parameters, an even
// deterministic sample beyond that). Dropout is off; this checks the exact
// loss the trainer differentiates, minus stochasticity.
double gradient_check(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
                      Eigen::Index tail, double epsilon = 1e-5);

namespace tucker_detail {

struct Gradients {
  double loss = 0.0;
  Eigen::MatrixXd entity;    // same shape as model.entity_embeddings()
  Eigen::MatrixXd relation;  // same shape as model.relation_embeddings()
  Eigen::MatrixXd core;      // same shape as model.core()
};

// Forward loss of one (head, relation) query against the full target vector.
double loss_at(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
               const Eigen::VectorXd& targets);

// Closed-form gradients of loss_at with respect to every parameter.
Gradients analytic_gradients(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
                             const Eigen::VectorXd& targets);

// Max discrepancy of `candidate` against finite differences of loss_at.
// gradient_check is this applied to analytic_gradients; tests feed it
// deliberately corrupted gradients to prove the check can fail.
double max_gradient_gap(const TuckerModel& model, Eigen::Index head, Eigen::Index relation,
                        const Eigen::VectorXd& targets, const Gradients& candidate,
                        double epsilon);

// Smoothed one-hot target vector for a single true tail.
Eigen::VectorXd smoothed_one_hot(Eigen::Index size, Eigen::Index tail, double label_smoothing);

}  // namespace tucker_detail

}  // namespace ladder
