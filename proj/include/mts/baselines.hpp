#pragma once

#include <span>
#include <string>
#include <vector>

#include "mts/errors.hpp"
#include "mts/votes.hpp"

namespace mts::baselines {

// Weighted vote: each classifier's label counts with its weight; arg-max
// score wins, ties to the lowest class index.  All-zero weights fall back to
// the unweighted majority so a fully uninformative weighting stays usable.
inline int weighted_majority_label(std::span<const int> row,
                                   std::span<const double> weights,
                                   int num_classes) {
  if (row.size() != weights.size())
    throw ShapeError("weighted_majority_label: " + std::to_string(row.size()) +
                     " votes vs " + std::to_string(weights.size()) +
                     " weights");
  if (row.empty()) throw InputError("weighted_majority_label: empty vote row");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0)
      throw InputError("weighted_majority_label: negative weight");
    total += w;
  }
  if (total <= 0.0) return majority_label(row, num_classes);
  std::vector<double> score(static_cast<std::size_t>(num_classes), 0.0);
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] < 0 || row[j] >= num_classes)
      throw InputError("weighted_majority_label: label out of range");
    score[static_cast<std::size_t>(row[j])] += weights[j];
  }
  int best = 0;
  for (int c = 1; c < num_classes; ++c)
    if (score[static_cast<std::size_t>(c)] >
        score[static_cast<std::size_t>(best)])
      best = c;
  return best;
}

// Per-classifier training accuracy, the standard weighting for weighted
// majority voting.
inline std::vector<double> training_accuracy_weights(
    const PredictionMatrix& preds, std::span<const int> truth) {
  if (preds.instances() != truth.size())
    throw ShapeError(
        "training_accuracy_weights: predictions and labels must align");
  if (preds.instances() == 0)
    throw InputError("training_accuracy_weights: empty predictions");
  std::vector<double> w(preds.classifiers(), 0.0);
  for (std::size_t i = 0; i < preds.instances(); ++i)
    for (std::size_t j = 0; j < preds.classifiers(); ++j)
      w[j] += preds.at(i, j) == truth[i];
  for (double& v : w) v /= static_cast<double>(preds.instances());
  return w;
}

}  // namespace mts::baselines
