#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "mts/dataset.hpp"
#include "mts/errors.hpp"
#include "mts/learners/model.hpp"
#include "mts/matrix.hpp"
#include "mts/rng.hpp"

namespace mts::learners {

struct LinearModel {
  std::vector<double> w;
  double b = 0.0;

  double margin(std::span<const double> x) const {
    double z = b;
    for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
    return z;
  }
};

inline double sigmoid(double z) {
  // Split on the sign to avoid overflow in exp().
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

enum class LinearKind { Perceptron, Logistic, Svm };

namespace detail {

// Classic perceptron: sample-at-a-time updates over shuffled epochs.  A
// margin of exactly zero counts as a mistake so training moves off the zero
// initializer.
inline LinearModel train_perceptron_binary(const Matrix& X,
                                           const std::vector<int>& y01,
                                           const std::vector<double>& sample_w,
                                           const ClassifierSpec& spec,
                                           RandomStream stream) {
  LinearModel m;
  m.w.assign(X.cols(), 0.0);
  std::vector<std::size_t> order(X.rows());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    stream.shuffle(order);
    for (std::size_t i : order) {
      double t = y01[i] ? 1.0 : -1.0;
      if (t * m.margin(X.row(i)) <= 0.0) {
        double step = spec.learning_rate * sample_w[i] * t;
        auto x = X.row(i);
        for (std::size_t j = 0; j < m.w.size(); ++j) m.w[j] += step * x[j];
        m.b += step;
      }
    }
  }
  return m;
}

// Full-batch gradient descent on weighted L2-regularized log loss.  The bias
// is not regularized.
inline LinearModel train_logistic_binary(const Matrix& X,
                                         const std::vector<int>& y01,
                                         const std::vector<double>& sample_w,
                                         const ClassifierSpec& spec) {
  LinearModel m;
  m.w.assign(X.cols(), 0.0);
  double total_w = std::accumulate(sample_w.begin(), sample_w.end(), 0.0);
  std::vector<double> gw(X.cols());
  for (int it = 0; it < spec.iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
      double r = sample_w[i] * (sigmoid(m.margin(X.row(i))) -
                                static_cast<double>(y01[i]));
      auto x = X.row(i);
      for (std::size_t j = 0; j < gw.size(); ++j) gw[j] += r * x[j];
      gb += r;
    }
    for (std::size_t j = 0; j < gw.size(); ++j)
      m.w[j] -= spec.learning_rate * (gw[j] / total_w + spec.l2 * m.w[j]);
    m.b -= spec.learning_rate * gb / total_w;
  }
  return m;
}

// Full-batch subgradient descent on the weighted hinge loss with an L2
// penalty on the weights (not the bias).
inline LinearModel train_svm_binary(const Matrix& X,
                                    const std::vector<int>& y01,
                                    const std::vector<double>& sample_w,
                                    const ClassifierSpec& spec) {
  LinearModel m;
  m.w.assign(X.cols(), 0.0);
  double total_w = std::accumulate(sample_w.begin(), sample_w.end(), 0.0);
  std::vector<double> gw(X.cols());
  for (int it = 0; it < spec.iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
      double t = y01[i] ? 1.0 : -1.0;
      if (t * m.margin(X.row(i)) >= 1.0) continue;
      double r = -sample_w[i] * t;
      auto x = X.row(i);
      for (std::size_t j = 0; j < gw.size(); ++j) gw[j] += r * x[j];
      gb += r;
    }
    for (std::size_t j = 0; j < gw.size(); ++j)
      m.w[j] -= spec.learning_rate * (gw[j] / total_w + spec.l2 * m.w[j]);
    m.b -= spec.learning_rate * gb / total_w;
  }
  return m;
}

inline LinearModel train_linear_binary(LinearKind kind, const Matrix& X,
                                       const std::vector<int>& y01,
                                       const std::vector<double>& sample_w,
                                       const ClassifierSpec& spec,
                                       const SeededRng& rng) {
  switch (kind) {
    case LinearKind::Perceptron:
      return train_perceptron_binary(X, y01, sample_w, spec, rng.stream());
    case LinearKind::Logistic:
      return train_logistic_binary(X, y01, sample_w, spec);
    case LinearKind::Svm:
      return train_svm_binary(X, y01, sample_w, spec);
  }
  throw ConfigurationError("train_linear_binary: unknown kind");
}

}  // namespace detail

// Linear classifier over two or more classes.  Binary problems train a
// single positive-vs-negative model and predict 1 when its margin is
// positive; multiclass problems train one-vs-rest heads and take the
// arg-max margin (ties to the lowest class index).
//
// Every head derives its randomness from the same child label, so all heads
// see identical shuffle orders.  Updates from a zero initializer are then
// exactly antisymmetric under label flips, which makes the two-head
// one-vs-rest variant agree with the single binary model bit for bit.
class LinearClassifier final : public Classifier {
 public:
  static LinearClassifier fit(LinearKind kind, const Dataset& train,
                              const std::vector<double>& sample_w,
                              const ClassifierSpec& spec, const SeededRng& rng,
                              bool force_one_vs_rest = false) {
    train.validate();
    if (sample_w.size() != train.size())
      throw ShapeError("LinearClassifier::fit: weight count mismatch");
    LinearClassifier c;
    c.num_classes_ = train.num_classes;
    c.dim_ = train.dim();
    SeededRng head_rng = rng.child("head");
    int heads = (train.num_classes == 2 && !force_one_vs_rest)
                    ? 1
                    : train.num_classes;
    std::vector<int> y01(train.size());
    for (int h = 0; h < heads; ++h) {
      int positive = heads == 1 ? 1 : h;
      for (std::size_t i = 0; i < train.size(); ++i)
        y01[i] = train.labels[i] == positive ? 1 : 0;
      c.heads_.push_back(detail::train_linear_binary(
          kind, train.features, y01, sample_w, spec, head_rng));
    }
    return c;
  }

  int num_classes() const override { return num_classes_; }
  std::size_t feature_dim() const override { return dim_; }
  std::size_t head_count() const { return heads_.size(); }
  const LinearModel& head(std::size_t h) const { return heads_[h]; }

 protected:
  int predict_impl(std::span<const double> x) const override {
    if (heads_.size() == 1) return heads_[0].margin(x) > 0.0 ? 1 : 0;
    int best = 0;
    double best_margin = heads_[0].margin(x);
    for (std::size_t h = 1; h < heads_.size(); ++h) {
      double m = heads_[h].margin(x);
      if (m > best_margin) {
        best = static_cast<int>(h);
        best_margin = m;
      }
    }
    return best;
  }

  std::vector<double> proba_impl(std::span<const double> x) const override {
    std::vector<double> p(static_cast<std::size_t>(num_classes_));
    if (heads_.size() == 1) {
      p[1] = sigmoid(heads_[0].margin(x));
      p[0] = 1.0 - p[1];
      return p;
    }
    // Softmax over margins: uncalibrated but monotone scores.
    double top = heads_[0].margin(x);
    for (std::size_t h = 0; h < heads_.size(); ++h)
      p[h] = heads_[h].margin(x), top = std::max(top, p[h]);
    double sum = 0.0;
    for (double& v : p) sum += (v = std::exp(v - top));
    for (double& v : p) v /= sum;
    return p;
  }

 private:
  LinearClassifier() = default;
  std::vector<LinearModel> heads_;
  int num_classes_ = 0;
  std::size_t dim_ = 0;
};

}  // namespace mts::learners
