#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mts/errors.hpp"
#include "mts/matrix.hpp"
#include "mts/rng.hpp"

namespace mts {

// Feature matrix plus integer labels in [0, num_classes).  Labels are always
// contiguous integers; ingestion is responsible for mapping class names.
struct Dataset {
  Matrix features;          // N x d
  std::vector<int> labels;  // length N
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }

  // Checks the structural invariants; throws on the first violation.
  void validate() const {
    if (num_classes < 2)
      throw InputError("Dataset: num_classes must be at least 2, got " +
                       std::to_string(num_classes));
    if (features.rows() != labels.size())
      throw ShapeError("Dataset: " + std::to_string(features.rows()) +
                       " feature rows vs " + std::to_string(labels.size()) +
                       " labels");
    if (labels.empty()) throw InputError("Dataset: empty");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= num_classes)
        throw InputError("Dataset: label " + std::to_string(labels[i]) +
                         " at row " + std::to_string(i) + " outside [0, " +
                         std::to_string(num_classes) + ")");
    }
    for (std::size_t i = 0; i < features.rows(); ++i)
      for (std::size_t j = 0; j < features.cols(); ++j)
        if (!std::isfinite(features.at(i, j)))
          throw InputError("Dataset: non-finite feature at row " +
                           std::to_string(i) + ", column " +
                           std::to_string(j));
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    return counts;
  }
};

namespace detail {

inline Dataset take_rows(const Dataset& data,
                         const std::vector<std::size_t>& rows) {
  Dataset out;
  out.num_classes = data.num_classes;
  out.features = Matrix(rows.size(), data.dim());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = data.features.row(rows[r]);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels.push_back(data.labels[rows[r]]);
  }
  return out;
}

}  // namespace detail

// Splits into (train, test) preserving class proportions.  Per-class test
// counts are rounded to the nearest integer and then clamped so that every
// class keeps at least one instance on each side.
inline std::pair<Dataset, Dataset> stratified_split(const Dataset& data,
                                                    double test_fraction,
                                                    const SeededRng& rng) {
  data.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InputError("stratified_split: test_fraction must lie in (0, 1)");

  std::vector<std::vector<std::size_t>> by_class(
      static_cast<std::size_t>(data.num_classes));
  for (std::size_t i = 0; i < data.size(); ++i)
    by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);

  std::vector<std::size_t> train_rows, test_rows;
  for (int c = 0; c < data.num_classes; ++c) {
    auto& members = by_class[static_cast<std::size_t>(c)];
    if (members.size() < 2)
      throw DegenerateInputError(
          "stratified_split: class " + std::to_string(c) + " has " +
          std::to_string(members.size()) + " instance(s); need at least 2");
    RandomStream stream = rng.child("class/" + std::to_string(c)).stream();
    stream.shuffle(members);
    auto want = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    want = std::clamp<std::size_t>(want, 1, members.size() - 1);
    test_rows.insert(test_rows.end(), members.begin(), members.begin() + want);
    train_rows.insert(train_rows.end(), members.begin() + want, members.end());
  }
  // Restore original row order so downstream results do not depend on class
  // iteration order.
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {detail::take_rows(data, train_rows),
          detail::take_rows(data, test_rows)};
}

// Returns a copy in which each label is independently replaced, with
// probability `rate`, by a uniformly random *different* class.
inline Dataset flip_labels(const Dataset& data, double rate,
                           const SeededRng& rng) {
  data.validate();
  if (!(rate >= 0.0 && rate <= 1.0))
    throw InputError("flip_labels: rate must lie in [0, 1]");
  Dataset out = data;
  RandomStream stream = rng.stream();
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    if (stream.uniform01() >= rate) continue;
    auto offset = 1 + stream.index(static_cast<std::size_t>(out.num_classes) - 1);
    out.labels[i] = static_cast<int>(
        (static_cast<std::size_t>(out.labels[i]) + offset) %
        static_cast<std::size_t>(out.num_classes));
  }
  return out;
}

// Per-column z-normalization.  Mean and population standard deviation come
// from the training set only and are applied to both sets; a zero-variance
// column maps to all zeros.
inline std::pair<Dataset, Dataset> z_normalize(const Dataset& train,
                                               const Dataset& test) {
  train.validate();
  test.validate();
  if (train.dim() != test.dim())
    throw ShapeError("z_normalize: train has " + std::to_string(train.dim()) +
                     " columns, test has " + std::to_string(test.dim()));
  std::size_t d = train.dim();
  std::size_t n = train.size();
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += train.features.at(i, j);
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double delta = train.features.at(i, j) - mean[j];
      sd[j] += delta * delta;
    }
  for (std::size_t j = 0; j < d; ++j)
    sd[j] = std::sqrt(sd[j] / static_cast<double>(n));

  auto apply = [&](const Dataset& src) {
    Dataset out = src;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = 0; j < d; ++j)
        out.features.at(i, j) =
            sd[j] > 0.0 ? (src.features.at(i, j) - mean[j]) / sd[j] : 0.0;
    return out;
  };
  return {apply(train), apply(test)};
}

}  // namespace mts
