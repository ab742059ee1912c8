#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mts/errors.hpp"

namespace mts {

// Per-class vote counts for one instance.
struct VoteProfile {
  std::vector<int> counts;  // length num_classes
  int total = 0;

  int num_classes() const { return static_cast<int>(counts.size()); }
};

inline VoteProfile vote_counts(std::span<const int> row, int num_classes) {
  if (num_classes < 2)
    throw InputError("vote_counts: num_classes must be at least 2");
  if (row.empty()) throw InputError("vote_counts: empty vote row");
  VoteProfile p;
  p.counts.assign(static_cast<std::size_t>(num_classes), 0);
  for (int label : row) {
    if (label < 0 || label >= num_classes)
      throw InputError("vote_counts: label " + std::to_string(label) +
                       " outside [0, " + std::to_string(num_classes) + ")");
    ++p.counts[static_cast<std::size_t>(label)];
    ++p.total;
  }
  return p;
}

// Majority label; ties resolve to the lowest class index.
inline int majority_label(const VoteProfile& profile) {
  if (profile.counts.empty() || profile.total == 0)
    throw InputError("majority_label: empty profile");
  auto it = std::max_element(profile.counts.begin(), profile.counts.end());
  return static_cast<int>(it - profile.counts.begin());
}

inline int majority_label(std::span<const int> row, int num_classes) {
  return majority_label(vote_counts(row, num_classes));
}

// Predictions of K classifiers on T instances: entry (i, j) is classifier
// j's label for instance i.
class PredictionMatrix {
 public:
  PredictionMatrix() = default;
  PredictionMatrix(std::size_t instances, std::size_t classifiers,
                   int num_classes)
      : instances_(instances),
        classifiers_(classifiers),
        num_classes_(num_classes),
        entries_(instances * classifiers, 0) {}

  int& at(std::size_t i, std::size_t j) {
    return entries_[i * classifiers_ + j];
  }
  int at(std::size_t i, std::size_t j) const {
    return entries_[i * classifiers_ + j];
  }
  std::span<const int> row(std::size_t i) const {
    return std::span<const int>(entries_.data() + i * classifiers_,
                                classifiers_);
  }

  std::size_t instances() const { return instances_; }
  std::size_t classifiers() const { return classifiers_; }
  int num_classes() const { return num_classes_; }

 private:
  std::size_t instances_ = 0;
  std::size_t classifiers_ = 0;
  int num_classes_ = 0;
  std::vector<int> entries_;
};

// Decides which instances count as "high disagreement".  The built-in table
// is calibrated for 15-member ensembles; any other ensemble size (or an
// unlisted class count) needs an explicit max_count override.
struct DisagreementPolicy {
  std::optional<int> max_count;  // highest vote count still "high"

  int threshold_for(int num_classes, int total_votes) const {
    if (max_count) {
      if (*max_count < 1 || *max_count > total_votes)
        throw ConfigurationError(
            "DisagreementPolicy: max_count override " +
            std::to_string(*max_count) + " outside [1, " +
            std::to_string(total_votes) + "]");
      return *max_count;
    }
    if (total_votes != 15)
      throw ConfigurationError(
          "DisagreementPolicy: built-in thresholds assume 15 votes, got " +
          std::to_string(total_votes) + "; set max_count explicitly");
    switch (num_classes) {
      case 2: return 9;
      case 3: return 6;
      case 4: return 6;
      case 6: return 5;
      case 10: return 3;
      default:
        throw ConfigurationError(
            "DisagreementPolicy: no built-in threshold for " +
            std::to_string(num_classes) + " classes; set max_count explicitly");
    }
  }
};

// True when the top vote count does not exceed the policy threshold, i.e.
// the ensemble is split enough that overriding the majority is on the table.
inline bool is_high_disagreement(const VoteProfile& profile, int num_classes,
                                 const DisagreementPolicy& policy = {}) {
  if (profile.num_classes() != num_classes)
    throw ShapeError("is_high_disagreement: profile has " +
                     std::to_string(profile.num_classes()) +
                     " classes, expected " + std::to_string(num_classes));
  int top = *std::max_element(profile.counts.begin(), profile.counts.end());
  return top <= policy.threshold_for(num_classes, profile.total);
}

// Fraction of positions where the two label sequences agree.
inline double accuracy(std::span<const int> predicted,
                       std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw ShapeError("accuracy: " + std::to_string(predicted.size()) +
                     " predictions vs " + std::to_string(truth.size()) +
                     " labels");
  if (predicted.empty()) throw InputError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace mts
