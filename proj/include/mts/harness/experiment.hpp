#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mts/baselines.hpp"
#include "mts/bts.hpp"
#include "mts/dataset.hpp"
#include "mts/errors.hpp"
#include "mts/harness/config.hpp"
#include "mts/harness/csv.hpp"
#include "mts/harness/ensemble.hpp"
#include "mts/learners/adaboost.hpp"
#include "mts/learners/train.hpp"
#include "mts/rng.hpp"
#include "mts/serum.hpp"
#include "mts/votes.hpp"

namespace mts::harness {

// Scores for one aggregation method over the whole test split, plus the
// high-disagreement view: `corrected` instances the method fixed relative to
// majority voting, `broken` ones it newly got wrong, and their net balance.
struct MethodOutcome {
  Method method = Method::Majority;
  std::vector<int> answers;
  std::vector<std::uint8_t> followed_minority;
  // Per-instance per-class prior/posterior evidence; empty for methods that
  // do not produce it (majority, weighted, adaboost, rf).
  std::vector<std::vector<double>> priors;
  std::vector<std::vector<double>> posteriors;
  double overall_accuracy = 0.0;
  long corrected = 0;
  long broken = 0;
  long net = 0;
  double improvement_pct = 0.0;  // 100 * net / subset size, 0 when empty
};

struct ExperimentReport {
  std::string dataset_name;
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  int num_classes = 0;
  std::size_t ensemble_size = 0;
  int disagreement_threshold = 0;
  std::size_t high_disagreement_count = 0;  // y
  std::vector<int> truth;
  std::vector<int> majority;
  std::vector<std::uint8_t> high_disagreement;
  PredictionMatrix votes;
  std::vector<MethodOutcome> methods;

  const MethodOutcome* find(Method m) const {
    for (const auto& outcome : methods)
      if (outcome.method == m) return &outcome;
    return nullptr;
  }
};

namespace detail {

inline MethodOutcome score_method(Method method, std::vector<int> answers,
                                  const ExperimentReport& report) {
  MethodOutcome out;
  out.method = method;
  out.followed_minority.resize(answers.size(), 0);
  for (std::size_t i = 0; i < answers.size(); ++i)
    out.followed_minority[i] = answers[i] != report.majority[i];
  out.overall_accuracy = accuracy(answers, report.truth);
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (!report.high_disagreement[i]) continue;
    const bool was_right = report.majority[i] == report.truth[i];
    const bool is_right = answers[i] == report.truth[i];
    if (is_right && !was_right) ++out.corrected;
    if (!is_right && was_right) ++out.broken;
  }
  out.net = out.corrected - out.broken;
  out.improvement_pct =
      report.high_disagreement_count == 0
          ? 0.0
          : 100.0 * static_cast<double>(out.net) /
                static_cast<double>(report.high_disagreement_count);
  out.answers = std::move(answers);
  return out;
}

}  // namespace detail

// Runs one experiment on an already-loaded dataset: split, build the noisy
// ensemble, score every selected aggregator on every test instance.  The
// master seed pins everything; per-stage seeds are label-derived, so adding
// or removing methods never shifts another method's results.
inline ExperimentReport run_prepared(const ExperimentConfig& config,
                                     const Dataset& data) {
  config.validate();
  data.validate();
  const SeededRng rng(config.seed);

  auto [train, test] =
      stratified_split(data, config.test_fraction, rng.child("split"));
  if (config.normalize) {
    auto normalized = z_normalize(train, test);
    train = std::move(normalized.first);
    test = std::move(normalized.second);
  }

  auto ensemble = build_noisy_ensemble(train, config.families,
                                       config.noise_rates,
                                       rng.child("ensemble"));

  const PredictionMatrix train_votes =
      learners::predict_matrix(ensemble, train.features);
  const PredictionMatrix test_votes =
      learners::predict_matrix(ensemble, test.features);

  ExperimentReport report;
  report.dataset_name = config.dataset.name;
  report.seed = config.seed;
  report.train_size = train.size();
  report.test_size = test.size();
  report.num_classes = data.num_classes;
  report.ensemble_size = ensemble.size();
  report.truth = test.labels;
  report.votes = test_votes;

  const DisagreementPolicy policy{config.disagreement_max_count};
  report.disagreement_threshold = policy.threshold_for(
      data.num_classes, static_cast<int>(ensemble.size()));
  report.majority.resize(test.size());
  report.high_disagreement.resize(test.size(), 0);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const VoteProfile profile =
        vote_counts(test_votes.row(i), data.num_classes);
    report.majority[i] = majority_label(profile);
    report.high_disagreement[i] =
        is_high_disagreement(profile, data.num_classes, policy);
    if (report.high_disagreement[i]) ++report.high_disagreement_count;
  }

  for (Method method : config.methods) {
    std::vector<int> answers(test.size());
    std::vector<std::vector<double>> priors;
    std::vector<std::vector<double>> posteriors;
    switch (method) {
      case Method::Majority:
        answers = report.majority;
        break;
      case Method::Weighted: {
        const auto weights =
            baselines::training_accuracy_weights(train_votes, train.labels);
        for (std::size_t i = 0; i < test.size(); ++i)
          answers[i] = baselines::weighted_majority_label(
              test_votes.row(i), weights, data.num_classes);
        break;
      }
      case Method::AdaBoost: {
        const auto model = learners::train_adaboost(
            train, config.comparison.adaboost_rounds,
            config.comparison.adaboost_depth,
            rng.child("comparison/adaboost"));
        for (std::size_t i = 0; i < test.size(); ++i)
          answers[i] = model.predict(test.features.row(i));
        break;
      }
      case Method::RandomForest: {
        auto spec = learners::ClassifierSpec::random_forest();
        spec.num_trees = config.comparison.rf_trees;
        spec.max_depth = config.comparison.rf_depth;
        const auto model = learners::train_classifier(
            spec, train, rng.child("comparison/rf"));
        for (std::size_t i = 0; i < test.size(); ++i)
          answers[i] = model->predict(test.features.row(i));
        break;
      }
      case Method::Hmts: {
        const auto model = serum::train_hmts(ensemble, train, config.hmts_regressor,
                                      rng.child("hmts"));
        priors.resize(test.size());
        posteriors.resize(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
          auto decision =
              serum::hmts_decide(model, test.features.row(i), test_votes.row(i));
          answers[i] = decision.answer;
          priors[i] = std::move(decision.prior);
          posteriors[i] = std::move(decision.posterior);
        }
        break;
      }
      case Method::Dmts: {
        const auto model =
            serum::train_dmts(ensemble, train, config.dmts_discriminator,
                       config.dmts_threshold, rng.child("dmts"));
        priors.resize(test.size());
        posteriors.resize(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
          auto decision =
              serum::dmts_decide(model, test.features.row(i), test_votes.row(i));
          answers[i] = decision.answer;
          priors[i] = std::move(decision.prior);
          posteriors[i] = std::move(decision.posterior);
        }
        break;
      }
      case Method::Bts: {
        // Machines cannot self-report peer predictions, so BTS runs on the
        // observed agreement fractions; with those the prior matches the
        // posterior and the rule coincides with majority voting.  Kept as the
        // reference point motivating the learned variants.
        std::vector<bts::AgentReport> reports(ensemble.size());
        priors.resize(test.size());
        posteriors.resize(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
          const auto row = test_votes.row(i);
          for (std::size_t jj = 0; jj < ensemble.size(); ++jj)
            reports[jj] = {row[jj], serum::peer_agreement_fraction(jj, row)};
          auto decision = bts::decide_multiclass(reports, data.num_classes);
          answers[i] = decision.answer;
          priors[i] = std::move(decision.prior);
          posteriors[i] = std::move(decision.posterior);
        }
        break;
      }
    }
    MethodOutcome outcome =
        detail::score_method(method, std::move(answers), report);
    outcome.priors = std::move(priors);
    outcome.posteriors = std::move(posteriors);
    report.methods.push_back(std::move(outcome));
  }
  return report;
}

// Loads the dataset named by the config, then runs the experiment.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.dataset.path.empty())
    throw ConfigurationError("config: dataset.path is required");
  Dataset data = load_csv(config.dataset.path, config.dataset.schema);
  if (!config.dataset.name.empty()) return run_prepared(config, data);
  ExperimentConfig named = config;
  named.dataset.name = std::filesystem::path(config.dataset.path).stem().string();
  return run_prepared(named, data);
}

}  // namespace mts::harness
