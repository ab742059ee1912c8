#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mts/errors.hpp"
#include "mts/matrix.hpp"
#include "mts/rng.hpp"

// Numerical verification of the two aggregation theorems on small discrete
// world models.
//
// Theorem 1 (counterfactual construction): given the signal distribution of
// the true label, P(s_k | y_{o*}), and per-signal posteriors P(y_o | s_k),
// there is an alternative joint distribution Q over (label, signal) under
// which the chosen label o has marginal Q(y_o) = 1/Z while every signal keeps
// its original posterior and the signal distribution conditioned on y_o
// matches the true label's:
//
//     Q(s_k)      = [P(s_k | y_{o*}) / P(y_o | s_k)] / Z
//     Z           = sum_r P(s_r | y_{o*}) / P(y_o | s_r)
//     Q(y_o, s_k) = Q(s_k) * P(y_o | s_k)
//
// Theorem 2 (systematic underestimation): in a binary-world model where votes
// depend on the latent world, the counted fraction of correct votes per
// signal, P(v_{o*} | s_j), never exceeds the true conditional accuracy
// P(v_{o*} | w_{o*}), and its signal-average is strictly below whenever some
// signal leaves doubt about the world.  The average is taken over the model's
// own signal distribution P(s | y_{o*}).
namespace mts::theory {

inline constexpr double kIdentityTol = 1e-10;
inline constexpr double kDistributionTol = 1e-12;

namespace detail {

inline void check_distribution(std::span<const double> p,
                               const std::string& what) {
  if (p.empty()) throw InputError(what + ": empty distribution");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0)
      throw InputError(what + ": entries must be finite and non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kDistributionTol)
    throw InputError(what + ": mass sums to " + std::to_string(sum));
}

inline void check_binary_rows(const Matrix& m, const std::string& what) {
  if (m.cols() != 2) throw ShapeError(what + ": expected two columns");
  for (std::size_t i = 0; i < m.rows(); ++i)
    check_distribution(m.row(i), what + " row " + std::to_string(i));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Theorem 1
// ---------------------------------------------------------------------------

// The constructed joint Q: q_signal[k] = Q(s_k), q_joint(k, o) = Q(y_o, s_k),
// q_marginal = Q(y_o) for the chosen label.
struct CounterfactualWorld {
  std::vector<double> q_signal;
  Matrix q_joint;
  double q_marginal = 0.0;
};

inline CounterfactualWorld construct_counterfactual(
    std::span<const double> signal_given_truth,
    const Matrix& posterior_given_signal, int chosen_o) {
  detail::check_distribution(signal_given_truth, "signal_given_truth");
  detail::check_binary_rows(posterior_given_signal, "posterior_given_signal");
  if (posterior_given_signal.rows() != signal_given_truth.size())
    throw ShapeError("construct_counterfactual: posterior rows must match "
                     "signal count");
  if (chosen_o != 0 && chosen_o != 1)
    throw InputError("construct_counterfactual: chosen label must be 0 or 1");

  const std::size_t m = signal_given_truth.size();
  const auto o = static_cast<std::size_t>(chosen_o);
  CounterfactualWorld world;
  world.q_signal.resize(m);
  double z = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double post = posterior_given_signal.at(k, o);
    if (post <= 0.0)
      throw DegenerateInputError(
          "construct_counterfactual: zero posterior for the chosen label at "
          "signal " +
          std::to_string(k));
    world.q_signal[k] = signal_given_truth[k] / post;
    z += world.q_signal[k];
  }
  for (double& q : world.q_signal) q /= z;
  world.q_marginal = 1.0 / z;

  world.q_joint = Matrix(m, 2);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t label = 0; label < 2; ++label)
      world.q_joint.at(k, label) =
          world.q_signal[k] * posterior_given_signal.at(k, label);
  return world;
}

struct Theorem1Report {
  bool passed = false;
  // Largest absolute deviation across all checked identities.
  double max_deviation = 0.0;
};

// Checks that under Q the chosen label's conditional signal distribution
// reproduces P(s_k | y_{o*}) and every per-signal posterior is preserved.
inline Theorem1Report verify_theorem1(const CounterfactualWorld& world,
                                      std::span<const double> signal_given_truth,
                                      const Matrix& posterior_given_signal,
                                      int chosen_o) {
  detail::check_distribution(signal_given_truth, "signal_given_truth");
  detail::check_binary_rows(posterior_given_signal, "posterior_given_signal");
  const std::size_t m = signal_given_truth.size();
  if (world.q_signal.size() != m || world.q_joint.rows() != m ||
      world.q_joint.cols() != 2 || posterior_given_signal.rows() != m)
    throw ShapeError("verify_theorem1: inconsistent shapes");
  if (chosen_o != 0 && chosen_o != 1)
    throw InputError("verify_theorem1: chosen label must be 0 or 1");
  if (world.q_marginal <= 0.0)
    throw InputError("verify_theorem1: chosen-label marginal must be positive");

  const auto o = static_cast<std::size_t>(chosen_o);
  Theorem1Report report;
  for (std::size_t k = 0; k < m; ++k) {
    // Q(s_k | y_o) = Q(y_o, s_k) / Q(y_o)  should equal  P(s_k | y_{o*}).
    const double cond_signal = world.q_joint.at(k, o) / world.q_marginal;
    report.max_deviation = std::max(
        report.max_deviation, std::abs(cond_signal - signal_given_truth[k]));
    // Q(y | s_k) = Q(y, s_k) / Q(s_k)  should preserve both posteriors.
    if (world.q_signal[k] <= 0.0)
      throw InputError("verify_theorem1: zero signal mass in Q");
    for (std::size_t label = 0; label < 2; ++label) {
      const double cond_label = world.q_joint.at(k, label) / world.q_signal[k];
      report.max_deviation =
          std::max(report.max_deviation,
                   std::abs(cond_label - posterior_given_signal.at(k, label)));
    }
  }
  report.passed = report.max_deviation <= kIdentityTol;
  return report;
}

// ---------------------------------------------------------------------------
// Theorem 2
// ---------------------------------------------------------------------------

// A binary-world voting model over m discrete signals.
//
//   signal_given_truth[k]    P(s_k | y_{o*}), the signal distribution
//   posterior_given_signal   m x 2, P(y_o | s_k)
//   true_label               o*
//   vote_given_world         2 x 2, row w, column v: P(v | w)
//   world_given_signal       m x 2, P(w | s_k)
//   c0                       classification threshold; W(s_k) = w_0 iff
//                            P(w_0 | s_k) > c0, = w_1 iff P(w_1 | s_k) > 1-c0
struct DiscreteWorldModel {
  std::vector<double> signal_given_truth;
  Matrix posterior_given_signal;
  int true_label = 0;
  Matrix vote_given_world;
  Matrix world_given_signal;
  double c0 = 0.5;

  std::size_t num_signals() const { return signal_given_truth.size(); }

  void validate() const {
    detail::check_distribution(signal_given_truth, "signal_given_truth");
    detail::check_binary_rows(posterior_given_signal,
                              "posterior_given_signal");
    detail::check_binary_rows(world_given_signal, "world_given_signal");
    detail::check_binary_rows(vote_given_world, "vote_given_world");
    const std::size_t m = num_signals();
    if (posterior_given_signal.rows() != m || world_given_signal.rows() != m)
      throw ShapeError("DiscreteWorldModel: per-signal tables must have one "
                       "row per signal");
    if (vote_given_world.rows() != 2)
      throw ShapeError("DiscreteWorldModel: vote table must be 2x2");
    if (true_label != 0 && true_label != 1)
      throw InputError("DiscreteWorldModel: true_label must be 0 or 1");
    if (!(c0 > 0.0 && c0 < 1.0))
      throw InputError("DiscreteWorldModel: c0 must lie in (0, 1)");
    // Every signal must classify to a definite world; a posterior exactly at
    // the threshold leaves W(s_k) undefined.
    for (std::size_t k = 0; k < m; ++k)
      if (std::abs(world_given_signal.at(k, 0) - c0) <= kDistributionTol)
        throw InputError("DiscreteWorldModel: W(s_" + std::to_string(k) +
                         ") undefined, P(w_0 | s_k) equals c0");
  }

  // W(s_k): the world each signal classifies to under the threshold rule.
  int classify_world(std::size_t k) const {
    return world_given_signal.at(k, 0) > c0 ? 0 : 1;
  }
};

struct Theorem2Report {
  // (a) Votes are informative: P(v_{o*} | w_{o*}) > P(v_{o*} | w_k), and the
  // Bayes-ratio identity for that quotient holds numerically.
  bool vote_inequality_holds = false;
  // (b)+(c) Per-signal estimates never exceed the actual conditional
  // accuracy, each is strict exactly when P(w_{o*} | s_j) < 1, and the
  // signal-averaged estimate agrees with the strictness flag.
  bool underestimation_holds = false;
  // Whether the averaged estimate is strictly below the actual accuracy.
  bool strictness = false;
  double actual = 0.0;            // P(v_{o*} | w_{o*})
  double average_estimate = 0.0;  // sum_j P(s_j | y_{o*}) P(v_{o*} | s_j)
  double max_identity_deviation = 0.0;
};

// Verifies both claims on a concrete model.  Derived quantities:
//   P(w)     = sum_k P(w | s_k) P(s_k | y_{o*})
//   P(v)     = sum_w P(v | w) P(w)
//   P(w | v) = P(v | w) P(w) / P(v)
// When the counterfactual world has zero mass (every signal certain of
// w_{o*}) the Bayes preconditions are vacuous and the theorem degenerates to
// exact equality; otherwise violated preconditions raise PreconditionError
// naming the failing inequality.
inline Theorem2Report verify_theorem2(const DiscreteWorldModel& model) {
  model.validate();
  const std::size_t m = model.num_signals();
  const auto o = static_cast<std::size_t>(model.true_label);
  const std::size_t k = 1 - o;
  const double c_star = model.true_label == 0 ? model.c0 : 1.0 - model.c0;

  double pw[2] = {0.0, 0.0};
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t w = 0; w < 2; ++w)
      pw[w] += model.world_given_signal.at(j, w) * model.signal_given_truth[j];
  double pv[2] = {0.0, 0.0};
  for (std::size_t w = 0; w < 2; ++w)
    for (std::size_t v = 0; v < 2; ++v)
      pv[v] += model.vote_given_world.at(w, v) * pw[w];

  Theorem2Report report;
  const double actual = model.vote_given_world.at(o, o);
  const double counter = model.vote_given_world.at(k, o);
  report.actual = actual;

  const bool vacuous = pw[k] <= kDistributionTol;
  if (!vacuous) {
    for (std::size_t v = 0; v < 2; ++v)
      if (pv[v] <= 0.0)
        throw PreconditionError("verify_theorem2: P(v_" + std::to_string(v) +
                                ") > 0 violated");
    // P(w_{o*} | v) via Bayes.
    const double p = model.vote_given_world.at(o, o) * pw[o] / pv[o];
    const double q = model.vote_given_world.at(o, k) * pw[o] / pv[k];
    if (!(p > c_star))
      throw PreconditionError(
          "verify_theorem2: P(w_o* | v_o*) > c_o* violated (" +
          std::to_string(p) + " vs " + std::to_string(c_star) + ")");
    if (!(q < c_star))
      throw PreconditionError(
          "verify_theorem2: P(w_o* | v_k) < c_o* violated (" +
          std::to_string(q) + " vs " + std::to_string(c_star) + ")");

    // The marginal never exceeds the vote-conditioned probability.
    const bool marginal_below = p > pw[o];
    // Bayes-ratio identity, cross-multiplied to stay finite when the
    // counterfactual world never votes for o*:
    //   P(v_o*|w_o*) / P(v_o*|w_k) = [p / (1-p)] * [(1 - P(w_o*)) / P(w_o*)]
    const double lhs = actual * (1.0 - p) * pw[o];
    const double rhs = counter * p * (1.0 - pw[o]);
    report.max_identity_deviation = std::abs(lhs - rhs);
    report.vote_inequality_holds =
        actual > counter && marginal_below &&
        report.max_identity_deviation <= kIdentityTol;
  } else {
    // No counterfactual mass: nothing to compare against, claim (a) is
    // vacuously true.
    report.vote_inequality_holds = true;
  }

  // (b): per-signal counted accuracy, marginalized over the latent world.
  bool per_signal_ok = true;
  bool any_strict = false;
  double average = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double certain = model.world_given_signal.at(j, o);
    const double est = actual * certain + counter * (1.0 - certain);
    average += model.signal_given_truth[j] * est;
    if (est > actual + kDistributionTol) per_signal_ok = false;
    const bool expect_strict =
        certain < 1.0 - kDistributionTol && actual > counter;
    const bool is_strict = est < actual - kDistributionTol;
    if (expect_strict != is_strict) per_signal_ok = false;
    if (is_strict && model.signal_given_truth[j] > kDistributionTol)
      any_strict = true;
  }
  report.average_estimate = average;
  // (c): the average drops strictly below exactly when some signal with mass
  // leaves room for the counterfactual world.
  report.strictness = actual - average > kDistributionTol;
  report.underestimation_holds =
      per_signal_ok && report.strictness == any_strict &&
      average <= actual + kDistributionTol;
  return report;
}

// ---------------------------------------------------------------------------
// Random model generation
// ---------------------------------------------------------------------------

// Uniform sample from the probability simplex (Dirichlet with unit
// concentration): normalized exponentials.  A positive floor rejects vectors
// with near-zero coordinates so downstream ratios stay well-conditioned.
inline std::vector<double> sample_simplex(RandomStream& stream, std::size_t n,
                                          double min_mass = 0.0) {
  if (n == 0) throw InputError("sample_simplex: need at least one coordinate");
  if (min_mass * static_cast<double>(n) >= 1.0)
    throw ConfigurationError("sample_simplex: floor excludes whole simplex");
  std::vector<double> x(n);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    double sum = 0.0;
    for (double& v : x) {
      v = -std::log(1.0 - stream.uniform01());
      sum += v;
    }
    for (double& v : x) v /= sum;
    bool ok = true;
    for (double v : x)
      if (v < min_mass) ok = false;
    if (ok) return x;
  }
  throw DegenerateInputError("sample_simplex: rejection sampling stalled");
}

struct Theorem1Inputs {
  std::vector<double> signal_given_truth;
  Matrix posterior_given_signal;
};

// Random well-conditioned inputs for the counterfactual construction:
// posteriors are kept off zero so the Q-weights stay finite.
inline Theorem1Inputs random_theorem1_inputs(RandomStream& stream,
                                             std::size_t num_signals) {
  Theorem1Inputs inputs;
  inputs.signal_given_truth = sample_simplex(stream, num_signals, 0.01);
  inputs.posterior_given_signal = Matrix(num_signals, 2);
  for (std::size_t kk = 0; kk < num_signals; ++kk) {
    const double p = stream.uniform(0.01, 0.99);
    inputs.posterior_given_signal.at(kk, 0) = p;
    inputs.posterior_given_signal.at(kk, 1) = 1.0 - p;
  }
  return inputs;
}

struct GeneratedModel {
  DiscreteWorldModel model;
  // Rejection-sampling attempts consumed to satisfy the preconditions.
  int attempts = 0;
};

// Rejection-samples a model satisfying Theorem 2's preconditions with a small
// margin, so verification never sits on a tolerance boundary.
inline GeneratedModel random_theorem2_model(RandomStream& stream,
                                            std::size_t num_signals) {
  constexpr double kMargin = 1e-3;
  GeneratedModel out;
  for (out.attempts = 1; out.attempts <= 100000; ++out.attempts) {
    DiscreteWorldModel model;
    model.signal_given_truth = sample_simplex(stream, num_signals, 0.01);
    model.c0 = stream.uniform(0.2, 0.8);
    model.true_label = stream.index(2) == 0 ? 0 : 1;
    model.world_given_signal = Matrix(num_signals, 2);
    bool tie = false;
    for (std::size_t kk = 0; kk < num_signals; ++kk) {
      const double w0 = stream.uniform(0.01, 0.99);
      if (std::abs(w0 - model.c0) < 0.01) tie = true;
      model.world_given_signal.at(kk, 0) = w0;
      model.world_given_signal.at(kk, 1) = 1.0 - w0;
    }
    if (tie) continue;
    model.vote_given_world = Matrix(2, 2);
    for (std::size_t w = 0; w < 2; ++w) {
      const double v0 = stream.uniform(0.01, 0.99);
      model.vote_given_world.at(w, 0) = v0;
      model.vote_given_world.at(w, 1) = 1.0 - v0;
    }
    model.posterior_given_signal = Matrix(num_signals, 2);
    for (std::size_t kk = 0; kk < num_signals; ++kk) {
      const double p = stream.uniform(0.01, 0.99);
      model.posterior_given_signal.at(kk, 0) = p;
      model.posterior_given_signal.at(kk, 1) = 1.0 - p;
    }

    // Re-derive the Bayes quantities and accept only clear-margin models.
    const auto o = static_cast<std::size_t>(model.true_label);
    const std::size_t kc = 1 - o;
    const double c_star = model.true_label == 0 ? model.c0 : 1.0 - model.c0;
    double pw[2] = {0.0, 0.0};
    for (std::size_t j = 0; j < num_signals; ++j)
      for (std::size_t w = 0; w < 2; ++w)
        pw[w] +=
            model.world_given_signal.at(j, w) * model.signal_given_truth[j];
    double pv[2] = {0.0, 0.0};
    for (std::size_t w = 0; w < 2; ++w)
      for (std::size_t v = 0; v < 2; ++v)
        pv[v] += model.vote_given_world.at(w, v) * pw[w];
    if (pv[0] < kMargin || pv[1] < kMargin) continue;
    const double p = model.vote_given_world.at(o, o) * pw[o] / pv[o];
    const double q = model.vote_given_world.at(o, kc) * pw[o] / pv[kc];
    if (p <= c_star + kMargin || q >= c_star - kMargin) continue;
    out.model = std::move(model);
    return out;
  }
  throw DegenerateInputError(
      "random_theorem2_model: rejection sampling stalled");
}

// The proof's exception case: every signal is certain of the true world, so
// counted and actual accuracy coincide exactly.
inline DiscreteWorldModel all_correct_model(RandomStream& stream,
                                            std::size_t num_signals) {
  DiscreteWorldModel model;
  model.signal_given_truth = sample_simplex(stream, num_signals, 0.01);
  model.c0 = 0.5;
  model.true_label = 0;
  model.world_given_signal = Matrix(num_signals, 2);
  for (std::size_t kk = 0; kk < num_signals; ++kk) {
    model.world_given_signal.at(kk, 0) = 1.0;
    model.world_given_signal.at(kk, 1) = 0.0;
  }
  model.vote_given_world = Matrix(2, 2);
  model.vote_given_world.at(0, 0) = 0.9;
  model.vote_given_world.at(0, 1) = 0.1;
  model.vote_given_world.at(1, 0) = 0.4;
  model.vote_given_world.at(1, 1) = 0.6;
  model.posterior_given_signal = Matrix(num_signals, 2);
  for (std::size_t kk = 0; kk < num_signals; ++kk) {
    model.posterior_given_signal.at(kk, 0) = 0.8;
    model.posterior_given_signal.at(kk, 1) = 0.2;
  }
  return model;
}

}  // namespace mts::theory
