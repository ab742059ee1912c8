#pragma once

#include <span>
#include <string>
#include <vector>

#include "mts/dataset.hpp"
#include "mts/errors.hpp"
#include "mts/learners/model.hpp"
#include "mts/learners/train.hpp"
#include "mts/rng.hpp"

namespace mts::harness {

// Builds the noise-diversified ensemble: one classifier per (family, rate)
// pair, each trained on its own label-flipped copy of the training split.
// Output order is family-major, and every flip/train pair draws from an
// independently derived seed so the ensemble is reproducible as a whole and
// member-by-member.
inline std::vector<learners::ClassifierPtr> build_noisy_ensemble(
    const Dataset& train, std::span<const learners::ClassifierSpec> families,
    std::span<const double> rates, const SeededRng& rng) {
  if (families.empty())
    throw InputError("build_noisy_ensemble: no classifier families");
  if (rates.empty()) throw InputError("build_noisy_ensemble: no noise rates");
  std::vector<learners::ClassifierPtr> ensemble;
  ensemble.reserve(families.size() * rates.size());
  for (std::size_t f = 0; f < families.size(); ++f) {
    for (std::size_t r = 0; r < rates.size(); ++r) {
      const std::string tag = std::to_string(f) + "/" + std::to_string(r);
      Dataset noisy = flip_labels(train, rates[r], rng.child("noise/" + tag));
      ensemble.push_back(learners::train_classifier(families[f], noisy,
                                                    rng.child("train/" + tag)));
    }
  }
  return ensemble;
}

}  // namespace mts::harness
