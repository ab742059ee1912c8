#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mts/errors.hpp"
#include "mts/learners/model.hpp"
#include "mts/learners/tree.hpp"
#include "mts/matrix.hpp"
#include "mts/rng.hpp"
#include "mts/votes.hpp"

namespace mts::learners {

struct ForestOptions {
  int num_trees = 15;
  int max_depth = 8;
  int mtry = -1;  // features per node; -1 means round(sqrt(d))
};

// Random forest: bootstrap-resampled Gini trees with per-node feature
// subsampling, combined by majority vote (ties to the lowest class index).
class RandomForest final : public Classifier {
 public:
  static RandomForest fit(const Matrix& X, const std::vector<int>& y,
                          const std::vector<double>& weights, int num_classes,
                          const ForestOptions& options, const SeededRng& rng) {
    if (X.rows() == 0) throw DegenerateInputError("RandomForest: empty input");
    if (y.size() != X.rows() || weights.size() != X.rows())
      throw ShapeError("RandomForest: rows, labels, and weights must align");
    if (options.num_trees < 1)
      throw ConfigurationError("RandomForest: num_trees must be >= 1");
    RandomForest f;
    f.num_classes_ = num_classes;
    f.dim_ = X.cols();
    TreeOptions tree_options;
    tree_options.max_depth = options.max_depth;
    tree_options.mtry =
        options.mtry >= 0
            ? options.mtry
            : static_cast<int>(std::lround(std::sqrt(static_cast<double>(X.cols()))));
    for (int t = 0; t < options.num_trees; ++t) {
      RandomStream stream = rng.child("tree/" + std::to_string(t)).stream();
      // Bootstrap sample; original sample weights ride along.
      Matrix bx(X.rows(), X.cols());
      std::vector<int> by(X.rows());
      std::vector<double> bw(X.rows());
      for (std::size_t i = 0; i < X.rows(); ++i) {
        std::size_t src = stream.index(X.rows());
        auto row = X.row(src);
        std::copy(row.begin(), row.end(), bx.row(i).begin());
        by[i] = y[src];
        bw[i] = weights[src];
      }
      f.trees_.push_back(
          DecisionTree::fit(bx, by, bw, num_classes, tree_options, &stream));
    }
    return f;
  }

  int num_classes() const override { return num_classes_; }
  std::size_t feature_dim() const override { return dim_; }
  std::size_t tree_count() const { return trees_.size(); }

 protected:
  int predict_impl(std::span<const double> x) const override {
    std::vector<int> votes(static_cast<std::size_t>(num_classes_), 0);
    for (const auto& t : trees_)
      ++votes[static_cast<std::size_t>(t.predict(x))];
    VoteProfile p;
    p.counts = std::move(votes);
    p.total = static_cast<int>(trees_.size());
    return majority_label(p);
  }

  std::vector<double> proba_impl(std::span<const double> x) const override {
    std::vector<double> p(static_cast<std::size_t>(num_classes_), 0.0);
    for (const auto& t : trees_)
      p[static_cast<std::size_t>(t.predict(x))] += 1.0;
    for (double& v : p) v /= static_cast<double>(trees_.size());
    return p;
  }

 private:
  RandomForest() = default;
  std::vector<DecisionTree> trees_;
  int num_classes_ = 0;
  std::size_t dim_ = 0;
};

}  // namespace mts::learners
