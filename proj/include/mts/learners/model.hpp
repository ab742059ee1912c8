#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mts/errors.hpp"
#include "mts/matrix.hpp"
#include "mts/votes.hpp"

namespace mts::learners {

// Interface for a trained classifier.  The public entry points validate the
// feature width once so implementations can assume well-shaped input.
class Classifier {
 public:
  virtual ~Classifier() = default;

  int predict(std::span<const double> x) const {
    check_dim(x.size());
    return predict_impl(x);
  }

  // Per-class scores summing to one.  The default is a one-hot distribution
  // on the predicted label; probabilistic families override it.
  std::vector<double> predict_proba(std::span<const double> x) const {
    check_dim(x.size());
    return proba_impl(x);
  }

  virtual int num_classes() const = 0;
  virtual std::size_t feature_dim() const = 0;

  // True when training degenerated and the model always answers one label.
  virtual bool constant() const { return false; }

 protected:
  virtual int predict_impl(std::span<const double> x) const = 0;
  virtual std::vector<double> proba_impl(std::span<const double> x) const {
    std::vector<double> p(static_cast<std::size_t>(num_classes()), 0.0);
    p[static_cast<std::size_t>(predict_impl(x))] = 1.0;
    return p;
  }

  void check_dim(std::size_t got) const {
    if (got != feature_dim())
      throw ShapeError("Classifier: expected " +
                       std::to_string(feature_dim()) + " features, got " +
                       std::to_string(got));
  }
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

class ConstantClassifier final : public Classifier {
 public:
  ConstantClassifier(int label, int num_classes, std::size_t feature_dim)
      : label_(label), num_classes_(num_classes), dim_(feature_dim) {
    if (label < 0 || label >= num_classes)
      throw InputError("ConstantClassifier: label out of range");
  }

  int num_classes() const override { return num_classes_; }
  std::size_t feature_dim() const override { return dim_; }
  bool constant() const override { return true; }

 protected:
  int predict_impl(std::span<const double>) const override { return label_; }

 private:
  int label_;
  int num_classes_;
  std::size_t dim_;
};

// Per-feature standardization fitted on training data.  Scale-sensitive
// learners apply it internally so they behave sensibly on raw-unit inputs;
// constant columns keep scale 1 and map to zero after centering.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> scale;

  static FeatureScaler fit(const Matrix& X) {
    FeatureScaler s;
    std::size_t n = X.rows(), d = X.cols();
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 0.0);
    if (n == 0) throw DegenerateInputError("FeatureScaler: empty input");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) s.mean[j] += X.at(i, j);
    for (double& v : s.mean) v /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double c = X.at(i, j) - s.mean[j];
        s.scale[j] += c * c;
      }
    for (double& v : s.scale) {
      v = std::sqrt(v / static_cast<double>(n));
      if (v < 1e-12) v = 1.0;
    }
    return s;
  }

  void transform_row(std::span<const double> x,
                     std::vector<double>& out) const {
    out.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      out[j] = (x[j] - mean[j]) / scale[j];
  }

  Matrix transform(const Matrix& X) const {
    Matrix out = X;
    for (std::size_t i = 0; i < out.rows(); ++i)
      for (std::size_t j = 0; j < out.cols(); ++j)
        out.at(i, j) = (X.at(i, j) - mean[j]) / scale[j];
    return out;
  }
};

// Interface for a trained regressor.
class Regressor {
 public:
  virtual ~Regressor() = default;

  double predict_value(std::span<const double> x) const {
    if (x.size() != feature_dim())
      throw ShapeError("Regressor: expected " +
                       std::to_string(feature_dim()) + " features, got " +
                       std::to_string(x.size()));
    return predict_impl(x);
  }

  virtual std::size_t feature_dim() const = 0;
  virtual bool constant() const { return false; }

 protected:
  virtual double predict_impl(std::span<const double> x) const = 0;
};

using RegressorPtr = std::shared_ptr<const Regressor>;

class ConstantRegressor final : public Regressor {
 public:
  ConstantRegressor(double value, std::size_t feature_dim)
      : value_(value), dim_(feature_dim) {}

  std::size_t feature_dim() const override { return dim_; }
  bool constant() const override { return true; }
  double value() const { return value_; }

 protected:
  double predict_impl(std::span<const double>) const override { return value_; }

 private:
  double value_;
  std::size_t dim_;
};

enum class ClassifierFamily {
  Perceptron,
  Logistic,
  LinearSvm,
  DecisionTree,
  RandomForest,
  Mlp,
};

inline const char* family_name(ClassifierFamily f) {
  switch (f) {
    case ClassifierFamily::Perceptron: return "perceptron";
    case ClassifierFamily::Logistic: return "logistic";
    case ClassifierFamily::LinearSvm: return "linear_svm";
    case ClassifierFamily::DecisionTree: return "decision_tree";
    case ClassifierFamily::RandomForest: return "random_forest";
    case ClassifierFamily::Mlp: return "mlp";
  }
  return "unknown";
}

inline std::optional<ClassifierFamily> family_from_name(std::string_view s) {
  if (s == "perceptron") return ClassifierFamily::Perceptron;
  if (s == "logistic") return ClassifierFamily::Logistic;
  if (s == "linear_svm" || s == "svm") return ClassifierFamily::LinearSvm;
  if (s == "decision_tree" || s == "tree") return ClassifierFamily::DecisionTree;
  if (s == "random_forest" || s == "forest") return ClassifierFamily::RandomForest;
  if (s == "mlp") return ClassifierFamily::Mlp;
  return std::nullopt;
}

// Hyperparameters for one classifier.  A single flat record keeps config
// plumbing simple; each family reads only the fields that apply to it, and
// the factory functions set the per-family defaults.
struct ClassifierSpec {
  ClassifierFamily family = ClassifierFamily::Logistic;
  double learning_rate = 0.1;
  int epochs = 100;      // pass count for sample-at-a-time or minibatch loops
  int iterations = 500;  // full-batch gradient steps
  double l2 = 1e-4;
  int max_depth = 8;
  int num_trees = 15;
  int hidden_units = 32;
  int batch_size = 32;
  // Reweight instances inversely to class frequency during training.
  bool balanced_class_weights = false;

  static ClassifierSpec perceptron() {
    ClassifierSpec s;
    s.family = ClassifierFamily::Perceptron;
    s.learning_rate = 0.1;
    s.epochs = 100;
    return s;
  }
  static ClassifierSpec logistic() {
    ClassifierSpec s;
    s.family = ClassifierFamily::Logistic;
    s.learning_rate = 0.1;
    s.iterations = 500;
    s.l2 = 1e-4;
    return s;
  }
  static ClassifierSpec linear_svm() {
    ClassifierSpec s;
    s.family = ClassifierFamily::LinearSvm;
    s.learning_rate = 0.1;
    s.iterations = 500;
    s.l2 = 1e-4;
    return s;
  }
  static ClassifierSpec decision_tree() {
    ClassifierSpec s;
    s.family = ClassifierFamily::DecisionTree;
    s.max_depth = 8;
    return s;
  }
  static ClassifierSpec random_forest() {
    ClassifierSpec s;
    s.family = ClassifierFamily::RandomForest;
    s.num_trees = 15;
    s.max_depth = 8;
    return s;
  }
  static ClassifierSpec mlp() {
    ClassifierSpec s;
    s.family = ClassifierFamily::Mlp;
    s.hidden_units = 32;
    s.epochs = 300;
    s.learning_rate = 0.01;
    s.batch_size = 32;
    return s;
  }

  void validate() const {
    if (!(learning_rate > 0.0))
      throw ConfigurationError("ClassifierSpec: learning_rate must be > 0");
    if (epochs < 1) throw ConfigurationError("ClassifierSpec: epochs must be >= 1");
    if (iterations < 1)
      throw ConfigurationError("ClassifierSpec: iterations must be >= 1");
    if (l2 < 0.0) throw ConfigurationError("ClassifierSpec: l2 must be >= 0");
    if (max_depth < 1)
      throw ConfigurationError("ClassifierSpec: max_depth must be >= 1");
    if (num_trees < 1)
      throw ConfigurationError("ClassifierSpec: num_trees must be >= 1");
    if (hidden_units < 1)
      throw ConfigurationError("ClassifierSpec: hidden_units must be >= 1");
    if (batch_size < 1)
      throw ConfigurationError("ClassifierSpec: batch_size must be >= 1");
  }
};

enum class RegressorFamily { Ridge, Mlp };

inline const char* regressor_family_name(RegressorFamily f) {
  return f == RegressorFamily::Ridge ? "ridge" : "mlp";
}

inline std::optional<RegressorFamily> regressor_family_from_name(
    std::string_view s) {
  if (s == "ridge") return RegressorFamily::Ridge;
  if (s == "mlp") return RegressorFamily::Mlp;
  return std::nullopt;
}

struct RegressorSpec {
  RegressorFamily family = RegressorFamily::Ridge;
  double alpha = 1.0;  // ridge penalty
  int hidden_units = 32;
  int epochs = 300;
  double learning_rate = 0.01;
  int batch_size = 32;

  static RegressorSpec ridge(double alpha = 1.0) {
    RegressorSpec s;
    s.family = RegressorFamily::Ridge;
    s.alpha = alpha;
    return s;
  }
  static RegressorSpec mlp() {
    RegressorSpec s;
    s.family = RegressorFamily::Mlp;
    return s;
  }

  void validate() const {
    if (alpha < 0.0) throw ConfigurationError("RegressorSpec: alpha must be >= 0");
    if (hidden_units < 1)
      throw ConfigurationError("RegressorSpec: hidden_units must be >= 1");
    if (epochs < 1) throw ConfigurationError("RegressorSpec: epochs must be >= 1");
    if (!(learning_rate > 0.0))
      throw ConfigurationError("RegressorSpec: learning_rate must be > 0");
    if (batch_size < 1)
      throw ConfigurationError("RegressorSpec: batch_size must be >= 1");
  }
};

// Runs every classifier over every row of X.  All members must agree on the
// feature width and the class count.
inline PredictionMatrix predict_matrix(std::span<const ClassifierPtr> ensemble,
                                       const Matrix& X) {
  if (ensemble.empty()) throw InputError("predict_matrix: empty ensemble");
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    if (!ensemble[j])
      throw InputError("predict_matrix: null classifier at index " +
                       std::to_string(j));
    if (ensemble[j]->feature_dim() != X.cols())
      throw ShapeError("predict_matrix: classifier " + std::to_string(j) +
                       " expects " + std::to_string(ensemble[j]->feature_dim()) +
                       " features, data has " + std::to_string(X.cols()));
    if (ensemble[j]->num_classes() != ensemble[0]->num_classes())
      throw ShapeError("predict_matrix: classifier " + std::to_string(j) +
                       " disagrees on the class count");
  }
  PredictionMatrix pm(X.rows(), ensemble.size(), ensemble[0]->num_classes());
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < ensemble.size(); ++j)
      pm.at(i, j) = ensemble[j]->predict(X.row(i));
  return pm;
}

}  // namespace mts::learners
