#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mts/dataset.hpp"
#include "mts/errors.hpp"
#include "mts/learners/model.hpp"
#include "mts/learners/tree.hpp"
#include "mts/rng.hpp"

namespace mts::learners {

// Multiclass AdaBoost (SAMME) over Gini decision trees.
class AdaBoostModel final : public Classifier {
 public:
  int num_classes() const override { return num_classes_; }
  std::size_t feature_dim() const override { return dim_; }
  std::size_t round_count() const { return alphas_.size(); }
  double alpha(std::size_t r) const { return alphas_[r]; }

 protected:
  int predict_impl(std::span<const double> x) const override {
    std::vector<double> score(static_cast<std::size_t>(num_classes_), 0.0);
    for (std::size_t r = 0; r < trees_.size(); ++r)
      score[static_cast<std::size_t>(trees_[r].predict(x))] += alphas_[r];
    int best = 0;
    for (int c = 1; c < num_classes_; ++c)
      if (score[static_cast<std::size_t>(c)] >
          score[static_cast<std::size_t>(best)])
        best = c;
    return best;
  }

 private:
  friend AdaBoostModel train_adaboost(const Dataset&, int, int,
                                      const SeededRng&);
  std::vector<DecisionTree> trees_;
  std::vector<double> alphas_;
  int num_classes_ = 0;
  std::size_t dim_ = 0;
};

// SAMME:  alpha_r = ln((1-err)/err) + ln(C-1), reweight misclassified
// instances by e^alpha, stop when the learner is no better than chance.
// A zero-error round gets a large fixed alpha and ends boosting.
//
// The rng parameter keeps the training interface uniform; the Gini trees
// used here consider every feature, so no randomness is consumed.
inline AdaBoostModel train_adaboost(const Dataset& train, int rounds,
                                    int max_depth, const SeededRng& rng) {
  (void)rng;
  train.validate();
  if (rounds < 1)
    throw ConfigurationError("train_adaboost: rounds must be >= 1");
  AdaBoostModel model;
  model.num_classes_ = train.num_classes;
  model.dim_ = train.dim();

  std::size_t n = train.size();
  double chance = 1.0 - 1.0 / static_cast<double>(train.num_classes);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  TreeOptions options;
  options.max_depth = max_depth;
  for (int r = 0; r < rounds; ++r) {
    DecisionTree tree = DecisionTree::fit(train.features, train.labels, w,
                                          train.num_classes, options, nullptr);
    double err = 0.0;
    std::vector<bool> miss(n);
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = tree.predict(train.features.row(i)) != train.labels[i];
      if (miss[i]) err += w[i];
    }
    if (err <= 0.0) {
      // Perfect learner: dominate the vote and stop.
      model.trees_.push_back(std::move(tree));
      model.alphas_.push_back(std::log(1e6));
      break;
    }
    if (err >= chance) {
      // At or below chance: boosting cannot help.  Keep a lone first round
      // so the model still predicts; otherwise just stop early.
      if (model.trees_.empty()) {
        model.trees_.push_back(std::move(tree));
        model.alphas_.push_back(1.0);
      }
      break;
    }
    double alpha = std::log((1.0 - err) / err) +
                   std::log(static_cast<double>(train.num_classes) - 1.0);
    model.trees_.push_back(std::move(tree));
    model.alphas_.push_back(alpha);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      total += w[i];
    }
    for (double& v : w) v /= total;
  }
  return model;
}

}  // namespace mts::learners
