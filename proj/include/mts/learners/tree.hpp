#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "mts/errors.hpp"
#include "mts/learners/model.hpp"
#include "mts/matrix.hpp"
#include "mts/rng.hpp"

namespace mts::learners {

struct TreeOptions {
  int max_depth = 8;
  int mtry = 0;  // features examined per node; 0 means all
};

// CART-style decision tree: axis-aligned splits chosen by weighted Gini
// impurity.  Sample weights flow through impurity, split selection, and leaf
// labels, which is what boosting needs.
class DecisionTree final : public Classifier {
 public:
  // `stream` supplies per-node feature subsampling when mtry > 0; it may be
  // null when mtry == 0, and the tree is then fully deterministic.
  static DecisionTree fit(const Matrix& X, const std::vector<int>& y,
                          const std::vector<double>& weights, int num_classes,
                          const TreeOptions& options, RandomStream* stream) {
    if (X.rows() == 0) throw DegenerateInputError("DecisionTree: empty input");
    if (y.size() != X.rows() || weights.size() != X.rows())
      throw ShapeError("DecisionTree: rows, labels, and weights must align");
    if (options.max_depth < 1)
      throw ConfigurationError("DecisionTree: max_depth must be >= 1");
    if (options.mtry > 0 && stream == nullptr)
      throw ConfigurationError("DecisionTree: mtry > 0 needs a random stream");
    DecisionTree t;
    t.num_classes_ = num_classes;
    t.dim_ = X.cols();
    std::vector<std::size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), 0);
    t.build(X, y, weights, rows, 0, options, stream);
    return t;
  }

  int num_classes() const override { return num_classes_; }
  std::size_t feature_dim() const override { return dim_; }
  std::size_t node_count() const { return nodes_.size(); }

 protected:
  int predict_impl(std::span<const double> x) const override {
    std::size_t n = 0;
    while (nodes_[n].feature >= 0) {
      n = x[static_cast<std::size_t>(nodes_[n].feature)] <= nodes_[n].threshold
              ? nodes_[n].left
              : nodes_[n].right;
    }
    return nodes_[n].label;
  }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::size_t left = 0, right = 0;
    int label = 0;
  };

  DecisionTree() = default;

  int weighted_majority(const std::vector<double>& class_w) const {
    return static_cast<int>(
        std::max_element(class_w.begin(), class_w.end()) - class_w.begin());
  }

  static double gini(const std::vector<double>& class_w, double total) {
    if (total <= 0.0) return 0.0;
    double g = 1.0;
    for (double w : class_w) {
      double f = w / total;
      g -= f * f;
    }
    return g;
  }

  // Builds the subtree over `rows` and returns its node index.
  std::size_t build(const Matrix& X, const std::vector<int>& y,
                    const std::vector<double>& weights,
                    std::vector<std::size_t>& rows, int depth,
                    const TreeOptions& options, RandomStream* stream) {
    std::vector<double> class_w(static_cast<std::size_t>(num_classes_), 0.0);
    double total = 0.0;
    for (std::size_t r : rows) {
      class_w[static_cast<std::size_t>(y[r])] += weights[r];
      total += weights[r];
    }
    int majority = weighted_majority(class_w);
    double impurity = gini(class_w, total);

    std::size_t self = nodes_.size();
    nodes_.push_back(Node{});
    nodes_[self].label = majority;
    if (depth >= options.max_depth || impurity <= 0.0 || rows.size() < 2 ||
        total <= 0.0)
      return self;

    // Any threshold between distinct values is admissible, even at zero
    // gain: recursing on an even split is what lets depth >= 2 capture
    // XOR-like concepts.  Purity, depth, and node size do the stopping.
    std::vector<std::size_t> features = candidate_features(options, stream);
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, std::size_t>> sorted;
    std::vector<double> left_w(class_w.size()), right_w(class_w.size());
    for (std::size_t f : features) {
      sorted.clear();
      for (std::size_t r : rows) sorted.emplace_back(X.at(r, f), r);
      std::sort(sorted.begin(), sorted.end());
      std::fill(left_w.begin(), left_w.end(), 0.0);
      right_w = class_w;
      double left_total = 0.0;
      for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        std::size_t r = sorted[k].second;
        auto cls = static_cast<std::size_t>(y[r]);
        left_w[cls] += weights[r];
        right_w[cls] -= weights[r];
        left_total += weights[r];
        if (sorted[k].first == sorted[k + 1].first) continue;
        double right_total = total - left_total;
        double score = (left_total * gini(left_w, left_total) +
                        right_total * gini(right_w, right_total)) /
                       total;
        if (score < best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (sorted[k].first + sorted[k + 1].first);
        }
      }
    }
    if (best_feature < 0) return self;  // nothing reduces impurity

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      if (X.at(r, static_cast<std::size_t>(best_feature)) <= best_threshold)
        left_rows.push_back(r);
      else
        right_rows.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[self].feature = best_feature;
    nodes_[self].threshold = best_threshold;
    std::size_t left =
        build(X, y, weights, left_rows, depth + 1, options, stream);
    std::size_t right =
        build(X, y, weights, right_rows, depth + 1, options, stream);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  std::vector<std::size_t> candidate_features(const TreeOptions& options,
                                              RandomStream* stream) const {
    std::vector<std::size_t> all(dim_);
    std::iota(all.begin(), all.end(), 0);
    if (options.mtry <= 0 ||
        static_cast<std::size_t>(options.mtry) >= dim_)
      return all;
    // Partial Fisher-Yates, then sort so split tie-breaking is by feature
    // index regardless of draw order.
    auto m = static_cast<std::size_t>(options.mtry);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t j = i + stream->index(all.size() - i);
      std::swap(all[i], all[j]);
    }
    all.resize(m);
    std::sort(all.begin(), all.end());
    return all;
  }

  std::vector<Node> nodes_;
  int num_classes_ = 0;
  std::size_t dim_ = 0;
};

}  // namespace mts::learners
