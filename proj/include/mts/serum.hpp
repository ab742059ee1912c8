#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mts/dataset.hpp"
#include "mts/decision.hpp"
#include "mts/errors.hpp"
#include "mts/learners/model.hpp"
#include "mts/learners/train.hpp"
#include "mts/matrix.hpp"
#include "mts/rng.hpp"
#include "mts/votes.hpp"

namespace mts::serum {

using MtsDecision = SurprisalDecision;

// Fraction of the *other* classifiers whose vote matches classifier j's.
inline double peer_agreement_fraction(std::size_t j, std::span<const int> row) {
  if (row.size() < 2)
    throw InputError("peer_agreement_fraction: need at least two votes");
  if (j >= row.size())
    throw InputError("peer_agreement_fraction: classifier index out of range");
  std::size_t agree = 0;
  for (std::size_t k = 0; k < row.size(); ++k)
    if (k != j && row[k] == row[j]) ++agree;
  return static_cast<double>(agree) / static_cast<double>(row.size() - 1);
}

// Entry (i, j): peer agreement of classifier j on training instance i.
inline Matrix peer_agreement_table(const PredictionMatrix& preds) {
  Matrix t(preds.instances(), preds.classifiers());
  for (std::size_t i = 0; i < preds.instances(); ++i)
    for (std::size_t j = 0; j < preds.classifiers(); ++j)
      t.at(i, j) = peer_agreement_fraction(j, preds.row(i));
  return t;
}

// Heuristic serum model: the ensemble plus one agreement regressor per
// (classifier, predicted label) cell.  Cell (j, l) estimates how much peer
// agreement classifier j tends to get on instances it labels l.
struct HmtsModel {
  std::vector<learners::ClassifierPtr> ensemble;
  std::vector<learners::RegressorPtr> cells;  // K x C, row-major
  int num_classes = 0;

  std::size_t members() const { return ensemble.size(); }

  // Regression output clamped to [0, 1] so downstream masses stay valid.
  double belief(std::size_t j, int label, std::span<const double> x) const {
    const auto& cell =
        cells[j * static_cast<std::size_t>(num_classes) +
              static_cast<std::size_t>(label)];
    return std::clamp(cell->predict_value(x), 0.0, 1.0);
  }
};

// Trains the per-cell regressors on the ensemble's own training votes.  A
// cell whose classifier never produced its label falls back to a constant at
// that classifier's mean peer agreement.
inline HmtsModel train_hmts(std::vector<learners::ClassifierPtr> ensemble,
                            const Dataset& train,
                            const learners::RegressorSpec& cell_spec,
                            const SeededRng& rng) {
  cell_spec.validate();
  train.validate();
  if (ensemble.size() < 2)
    throw InputError("train_hmts: need at least two classifiers");
  PredictionMatrix preds = learners::predict_matrix(ensemble, train.features);
  if (preds.num_classes() != train.num_classes)
    throw ShapeError("train_hmts: ensemble and data disagree on classes");
  Matrix table = peer_agreement_table(preds);

  HmtsModel model;
  model.num_classes = train.num_classes;
  std::size_t k = ensemble.size();
  auto c = static_cast<std::size_t>(train.num_classes);
  model.cells.resize(k * c);
  for (std::size_t j = 0; j < k; ++j) {
    double col_mean = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) col_mean += table.at(i, j);
    col_mean /= static_cast<double>(train.size());
    for (std::size_t l = 0; l < c; ++l) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < train.size(); ++i)
        if (preds.at(i, j) == static_cast<int>(l)) rows.push_back(i);
      if (rows.empty()) {
        model.cells[j * c + l] =
            std::make_shared<learners::ConstantRegressor>(col_mean,
                                                          train.dim());
        continue;
      }
      Matrix sub(rows.size(), train.dim());
      std::vector<double> targets(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        auto src = train.features.row(rows[r]);
        std::copy(src.begin(), src.end(), sub.row(r).begin());
        targets[r] = table.at(rows[r], j);
      }
      model.cells[j * c + l] = learners::train_regressor(
          cell_spec, sub, targets,
          rng.child("cell/" + std::to_string(j) + "/" + std::to_string(l)));
    }
  }
  model.ensemble = std::move(ensemble);
  return model;
}

// Posterior over classes: the observed vote fractions.
inline std::vector<double> hmts_posteriors(std::span<const int> row,
                                           int num_classes) {
  VoteProfile p = vote_counts(row, num_classes);
  std::vector<double> post(p.counts.size());
  for (std::size_t c = 0; c < post.size(); ++c)
    post[c] = static_cast<double>(p.counts[c]) / static_cast<double>(p.total);
  return post;
}

// One classifier's prior mass on class c, given its belief vector g_row and
// its own prediction.  The predicted class keeps its believed agreement; the
// complement is distributed over the other classes in proportion to their
// believed agreement (uniformly when all of those beliefs are zero).
inline double classifier_prior_mass(std::span<const double> g_row,
                                    int predicted, int c) {
  if (predicted < 0 || static_cast<std::size_t>(predicted) >= g_row.size())
    throw InputError("classifier_prior_mass: predicted label out of range");
  if (c < 0 || static_cast<std::size_t>(c) >= g_row.size())
    throw InputError("classifier_prior_mass: class out of range");
  double own = g_row[static_cast<std::size_t>(predicted)];
  if (c == predicted) return own;
  double residual = 1.0 - own;
  double denom = 0.0;
  for (std::size_t l = 0; l < g_row.size(); ++l)
    if (static_cast<int>(l) != predicted) denom += g_row[l];
  if (denom <= 0.0)
    return residual / static_cast<double>(g_row.size() - 1);
  return residual * g_row[static_cast<std::size_t>(c)] / denom;
}

// Ensemble prior: the average of the per-classifier mass vectors.  `g` holds
// one belief row per classifier (K x C, already clamped to [0, 1]).
inline std::vector<double> assemble_priors(const Matrix& g,
                                           std::span<const int> row) {
  if (g.rows() != row.size())
    throw ShapeError("assemble_priors: belief rows and votes must align");
  if (g.cols() < 2)
    throw InputError("assemble_priors: need at least two classes");
  std::vector<double> prior(g.cols(), 0.0);
  for (std::size_t j = 0; j < g.rows(); ++j)
    for (std::size_t c = 0; c < g.cols(); ++c)
      prior[c] += classifier_prior_mass(g.row(j), row[j], static_cast<int>(c));
  for (double& v : prior) v /= static_cast<double>(g.rows());
  return prior;
}

namespace detail {

inline Matrix belief_table(const HmtsModel& model, std::span<const double> x) {
  Matrix g(model.members(), static_cast<std::size_t>(model.num_classes));
  for (std::size_t j = 0; j < model.members(); ++j)
    for (int l = 0; l < model.num_classes; ++l)
      g.at(j, static_cast<std::size_t>(l)) = model.belief(j, l, x);
  return g;
}

}  // namespace detail

inline std::vector<double> hmts_priors(const HmtsModel& model,
                                       std::span<const double> x,
                                       std::span<const int> row) {
  if (row.size() != model.members())
    throw ShapeError("hmts_priors: vote row does not match ensemble size");
  return assemble_priors(detail::belief_table(model, x), row);
}

// Binary view: prior probability that label 1 is the answer.
inline double hmts_prior_binary(const HmtsModel& model,
                                std::span<const double> x,
                                std::span<const int> row) {
  if (model.num_classes != 2)
    throw InputError("hmts_prior_binary: model is not binary");
  return hmts_priors(model, x, row)[1];
}

inline double hmts_prior_multiclass(const HmtsModel& model,
                                    std::span<const double> x,
                                    std::span<const int> row, int c) {
  if (model.num_classes < 3)
    throw InputError("hmts_prior_multiclass: model has fewer than 3 classes");
  if (c < 0 || c >= model.num_classes)
    throw InputError("hmts_prior_multiclass: class out of range");
  return hmts_priors(model, x, row)[static_cast<std::size_t>(c)];
}

// Pure decision from precomputed beliefs; the test suites drive this
// directly with synthetic tables.
inline MtsDecision hmts_decide_from(const Matrix& g, std::span<const int> row) {
  auto priors = assemble_priors(g, row);
  auto posteriors = hmts_posteriors(row, static_cast<int>(g.cols()));
  int majority = majority_label(row, static_cast<int>(g.cols()));
  return decide_surprising(std::move(priors), std::move(posteriors), majority);
}

inline MtsDecision hmts_decide(const HmtsModel& model,
                               std::span<const double> x,
                               std::span<const int> row) {
  if (row.size() != model.members())
    throw ShapeError("hmts_decide: vote row does not match ensemble size");
  return hmts_decide_from(detail::belief_table(model, x), row);
}

// Discriminative serum model: a binary discriminator trained to recognize
// instances where the ensemble majority is wrong.
struct DmtsModel {
  std::vector<learners::ClassifierPtr> ensemble;
  learners::ClassifierPtr discriminator;  // over {keep = 0, flip = 1}
  double threshold = 0.5;
  int num_classes = 0;

  std::size_t members() const { return ensemble.size(); }
};

// Target for the discriminator: 1 where the majority vote misses the truth.
inline std::vector<int> build_dmts_targets(const PredictionMatrix& preds,
                                           std::span<const int> truth) {
  if (preds.instances() != truth.size())
    throw ShapeError("build_dmts_targets: predictions and labels must align");
  std::vector<int> t(preds.instances());
  for (std::size_t i = 0; i < preds.instances(); ++i)
    t[i] = majority_label(preds.row(i), preds.num_classes()) != truth[i];
  return t;
}

inline DmtsModel train_dmts(std::vector<learners::ClassifierPtr> ensemble,
                            const Dataset& train,
                            const learners::ClassifierSpec& discriminator_spec,
                            double threshold, const SeededRng& rng) {
  discriminator_spec.validate();
  train.validate();
  if (ensemble.size() < 2)
    throw InputError("train_dmts: need at least two classifiers");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ConfigurationError("train_dmts: threshold must lie in (0, 1)");
  PredictionMatrix preds = learners::predict_matrix(ensemble, train.features);
  if (preds.num_classes() != train.num_classes)
    throw ShapeError("train_dmts: ensemble and data disagree on classes");

  Dataset flips;
  flips.features = train.features;
  flips.labels = build_dmts_targets(preds, train.labels);
  flips.num_classes = 2;
  // If the majority is always right (or always wrong) on the training set,
  // train_classifier degrades to a flagged constant discriminator.
  DmtsModel model;
  model.discriminator = learners::train_classifier(
      discriminator_spec, flips, rng.child("discriminator"));
  model.threshold = threshold;
  model.num_classes = train.num_classes;
  model.ensemble = std::move(ensemble);
  return model;
}

// Flip target: the best-supported non-majority class (ties to the lowest
// index).  Callers guarantee the profile is not unanimous.
inline int runner_up_label(const VoteProfile& profile, int majority) {
  int best = -1;
  for (int c = 0; c < profile.num_classes(); ++c) {
    if (c == majority) continue;
    if (best < 0 || profile.counts[static_cast<std::size_t>(c)] >
                        profile.counts[static_cast<std::size_t>(best)])
      best = c;
  }
  return best;
}

// DMTS has no belief model, so the decision carries the vote fractions as
// both prior and posterior and leaves c_sat empty; reports can then treat
// every serum method uniformly.
inline MtsDecision dmts_decide(const DmtsModel& model,
                               std::span<const double> x,
                               std::span<const int> row) {
  if (row.size() != model.members())
    throw ShapeError("dmts_decide: vote row does not match ensemble size");
  VoteProfile profile = vote_counts(row, model.num_classes);
  int majority = majority_label(profile);
  MtsDecision d;
  d.posterior = hmts_posteriors(row, model.num_classes);
  d.prior = d.posterior;
  d.answer = majority;
  if (profile.counts[static_cast<std::size_t>(majority)] != profile.total) {
    double p_flip = model.discriminator->predict_proba(x)[1];
    if (p_flip >= model.threshold) d.answer = runner_up_label(profile, majority);
  }
  d.followed_minority = d.answer != majority;
  return d;
}

}  // namespace mts::serum
