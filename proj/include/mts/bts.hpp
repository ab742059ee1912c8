#pragma once

#include <span>
#include <string>
#include <vector>

#include "mts/decision.hpp"
#include "mts/errors.hpp"
#include "mts/votes.hpp"

namespace mts::bts {

// One agent's answer plus its stated belief: the fraction of peers the agent
// expects to answer the same way it did.
struct AgentReport {
  int label = 0;
  double peer_fraction = 0.0;
};

struct BtsDecision {
  int answer = 0;
  double prior = 0.0;      // prior probability of label 1
  double posterior = 0.0;  // observed frequency of label 1
  bool followed_minority = false;
};

namespace detail {

inline void check_reports(std::span<const AgentReport> reports,
                          int num_classes) {
  if (reports.empty()) throw InputError("bts: empty report list");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].label < 0 || reports[i].label >= num_classes)
      throw InputError("bts: report " + std::to_string(i) + " has label " +
                       std::to_string(reports[i].label) + ", expected [0, " +
                       std::to_string(num_classes) + ")");
    if (!(reports[i].peer_fraction >= 0.0 && reports[i].peer_fraction <= 1.0))
      throw InputError("bts: report " + std::to_string(i) +
                       " has peer fraction outside [0, 1]");
  }
}

}  // namespace detail

// Observed popularity of `label` among the answers.
inline double posterior(std::span<const AgentReport> reports, int label,
                        int num_classes = 2) {
  detail::check_reports(reports, num_classes);
  if (label < 0 || label >= num_classes)
    throw InputError("bts::posterior: label out of range");
  std::size_t hits = 0;
  for (const auto& r : reports) hits += r.label == label;
  return static_cast<double>(hits) / static_cast<double>(reports.size());
}

// Predicted popularity of `label`: an agent that answered `label` contributes
// its stated peer fraction; any other agent contributes its residual belief,
// split uniformly over the classes it did not answer.
inline double prior(std::span<const AgentReport> reports, int label,
                    int num_classes = 2) {
  detail::check_reports(reports, num_classes);
  if (label < 0 || label >= num_classes)
    throw InputError("bts::prior: label out of range");
  double sum = 0.0;
  for (const auto& r : reports) {
    if (r.label == label)
      sum += r.peer_fraction;
    else
      sum += (1.0 - r.peer_fraction) / static_cast<double>(num_classes - 1);
  }
  return sum / static_cast<double>(reports.size());
}

inline std::vector<double> priors(std::span<const AgentReport> reports,
                                  int num_classes) {
  std::vector<double> p(static_cast<std::size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c)
    p[static_cast<std::size_t>(c)] = prior(reports, c, num_classes);
  return p;
}

inline std::vector<double> posteriors(std::span<const AgentReport> reports,
                                      int num_classes) {
  std::vector<double> p(static_cast<std::size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c)
    p[static_cast<std::size_t>(c)] = posterior(reports, c, num_classes);
  return p;
}

inline int majority(std::span<const AgentReport> reports, int num_classes) {
  std::vector<int> labels;
  labels.reserve(reports.size());
  for (const auto& r : reports) labels.push_back(r.label);
  return majority_label(labels, num_classes);
}

// General surprisal vote over report lists.
inline SurprisalDecision decide_multiclass(
    std::span<const AgentReport> reports, int num_classes) {
  detail::check_reports(reports, num_classes);
  return decide_surprising(priors(reports, num_classes),
                           posteriors(reports, num_classes),
                           majority(reports, num_classes));
}

// Binary convenience wrapper: answer 1 when label 1 is more popular than
// predicted, 0 when less, and the majority label on an exact tie.
inline BtsDecision decide(std::span<const AgentReport> reports) {
  SurprisalDecision d = decide_multiclass(reports, 2);
  return BtsDecision{d.answer, d.prior[1], d.posterior[1],
                     d.followed_minority};
}

}  // namespace mts::bts
