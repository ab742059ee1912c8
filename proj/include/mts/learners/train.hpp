#pragma once

#include <memory>
#include <vector>

#include "mts/dataset.hpp"
#include "mts/errors.hpp"
#include "mts/learners/forest.hpp"
#include "mts/learners/linear.hpp"
#include "mts/learners/mlp.hpp"
#include "mts/learners/model.hpp"
#include "mts/learners/ridge.hpp"
#include "mts/learners/tree.hpp"
#include "mts/rng.hpp"
#include "mts/votes.hpp"

namespace mts::learners {

namespace detail {

// Inverse-frequency weights: n / (present_classes * count_c); uniform 1.0
// when balancing is off.  Only relative size matters downstream.
inline std::vector<double> sample_weights(const Dataset& data, bool balanced) {
  std::vector<double> w(data.size(), 1.0);
  if (!balanced) return w;
  auto counts = data.class_counts();
  int present = 0;
  for (auto c : counts) present += c > 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto c = counts[static_cast<std::size_t>(data.labels[i])];
    w[i] = static_cast<double>(data.size()) /
           (static_cast<double>(present) * static_cast<double>(c));
  }
  return w;
}

inline bool all_features_constant(const Dataset& data) {
  for (std::size_t j = 0; j < data.dim(); ++j) {
    double first = data.features.at(0, j);
    for (std::size_t i = 1; i < data.size(); ++i)
      if (data.features.at(i, j) != first) return false;
  }
  return true;
}

}  // namespace detail

// Trains one classifier according to the spec.  Degenerate input (a single
// instance, a single observed label, or features with no variation at all)
// produces a majority-label ConstantClassifier, flagged via constant().
inline ClassifierPtr train_classifier(const ClassifierSpec& spec,
                                      const Dataset& train,
                                      const SeededRng& rng) {
  spec.validate();
  train.validate();

  auto counts = train.class_counts();
  int distinct = 0;
  for (auto c : counts) distinct += c > 0;
  if (train.size() < 2 || distinct < 2 ||
      detail::all_features_constant(train)) {
    VoteProfile p;
    p.counts.assign(counts.size(), 0);
    for (std::size_t c = 0; c < counts.size(); ++c)
      p.counts[c] = static_cast<int>(counts[c]);
    p.total = static_cast<int>(train.size());
    return std::make_shared<ConstantClassifier>(majority_label(p),
                                                train.num_classes,
                                                train.dim());
  }

  auto weights = detail::sample_weights(train, spec.balanced_class_weights);
  switch (spec.family) {
    case ClassifierFamily::Perceptron:
      return std::make_shared<LinearClassifier>(LinearClassifier::fit(
          LinearKind::Perceptron, train, weights, spec, rng.child("linear")));
    case ClassifierFamily::Logistic:
      return std::make_shared<LinearClassifier>(LinearClassifier::fit(
          LinearKind::Logistic, train, weights, spec, rng.child("linear")));
    case ClassifierFamily::LinearSvm:
      return std::make_shared<LinearClassifier>(LinearClassifier::fit(
          LinearKind::Svm, train, weights, spec, rng.child("linear")));
    case ClassifierFamily::DecisionTree: {
      TreeOptions options;
      options.max_depth = spec.max_depth;
      return std::make_shared<DecisionTree>(
          DecisionTree::fit(train.features, train.labels, weights,
                            train.num_classes, options, nullptr));
    }
    case ClassifierFamily::RandomForest: {
      ForestOptions options;
      options.num_trees = spec.num_trees;
      options.max_depth = spec.max_depth;
      return std::make_shared<RandomForest>(
          RandomForest::fit(train.features, train.labels, weights,
                            train.num_classes, options, rng.child("forest")));
    }
    case ClassifierFamily::Mlp:
      return std::make_shared<MlpClassifier>(
          MlpClassifier::fit(train, weights, spec, rng.child("mlp")));
  }
  throw ConfigurationError("train_classifier: unknown family");
}

// Trains one regressor.  A single training row degenerates to a constant.
inline RegressorPtr train_regressor(const RegressorSpec& spec, const Matrix& X,
                                    const std::vector<double>& y,
                                    const SeededRng& rng) {
  spec.validate();
  if (X.rows() == 0) throw DegenerateInputError("train_regressor: empty input");
  if (y.size() != X.rows())
    throw ShapeError("train_regressor: rows and targets must align");
  if (X.rows() == 1)
    return std::make_shared<ConstantRegressor>(y[0], X.cols());
  switch (spec.family) {
    case RegressorFamily::Ridge:
      return std::make_shared<RidgeModel>(fit_ridge(X, y, spec.alpha));
    case RegressorFamily::Mlp:
      return std::make_shared<MlpRegressorModel>(
          MlpRegressorModel::fit(X, y, spec, rng.child("mlp")));
  }
  throw ConfigurationError("train_regressor: unknown family");
}

}  // namespace mts::learners
