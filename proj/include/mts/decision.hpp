#pragma once

#include <string>
#include <vector>

#include "mts/errors.hpp"

namespace mts {

// Gaps this small are treated as exact prior/posterior ties.  Meaningful
// gaps are quantized by vote fractions (1/K scale); this guard only absorbs
// floating-point noise so that real-valued ties stay ties.
inline constexpr double kSurprisalEps = 1e-9;

// Outcome of a surprisal-based vote: the chosen label together with the
// evidence behind it.  `followed_minority` is true whenever the answer
// differs from the plain majority label.
struct SurprisalDecision {
  int answer = 0;
  std::vector<double> prior;      // per class
  std::vector<double> posterior;  // per class
  std::vector<int> c_sat;         // classes where posterior exceeds prior
  bool followed_minority = false;
};

// Shared decision rule: among classes whose posterior strictly exceeds their
// prior, pick the one with the largest gap (ties to the lowest index); if no
// class is more popular than expected, keep the majority label.
inline SurprisalDecision decide_surprising(std::vector<double> prior,
                                           std::vector<double> posterior,
                                           int majority) {
  if (prior.size() != posterior.size())
    throw ShapeError("decide_surprising: prior has " +
                     std::to_string(prior.size()) + " entries, posterior " +
                     std::to_string(posterior.size()));
  if (prior.size() < 2)
    throw InputError("decide_surprising: need at least two classes");
  if (majority < 0 || static_cast<std::size_t>(majority) >= prior.size())
    throw InputError("decide_surprising: majority label out of range");

  SurprisalDecision d;
  d.prior = std::move(prior);
  d.posterior = std::move(posterior);
  int best = -1;
  double best_gap = 0.0;
  for (std::size_t c = 0; c < d.prior.size(); ++c) {
    double gap = d.posterior[c] - d.prior[c];
    if (gap > kSurprisalEps) {
      d.c_sat.push_back(static_cast<int>(c));
      if (best < 0 || gap > best_gap) {
        best = static_cast<int>(c);
        best_gap = gap;
      }
    }
  }
  d.answer = best >= 0 ? best : majority;
  d.followed_minority = d.answer != majority;
  return d;
}

}  // namespace mts
