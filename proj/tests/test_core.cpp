#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "mts/dataset.hpp"
#include "mts/decision.hpp"
#include "mts/errors.hpp"
#include "mts/matrix.hpp"
#include "mts/rng.hpp"
#include "mts/votes.hpp"

namespace {

using mts::Dataset;
using mts::Matrix;
using mts::SeededRng;

TEST(Rng, SameSeedSameStream) {
  SeededRng a(42), b(42);
  auto sa = a.stream(), sb = b.stream();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sa.next_u64(), sb.next_u64());
}

TEST(Rng, ChildrenAreIndependentAndStable) {
  SeededRng root(7);
  EXPECT_EQ(root.child("alpha").seed(), root.child("alpha").seed());
  EXPECT_NE(root.child("alpha").seed(), root.child("beta").seed());
  EXPECT_NE(root.child("alpha").seed(), root.seed());
  // Deriving a child must not depend on any draw having happened before.
  auto s = root.stream();
  s.next_u64();
  EXPECT_EQ(root.child("alpha").seed(), SeededRng(7).child("alpha").seed());
  EXPECT_EQ(root.child("a").child("b").path(), "root/a/b");
}

TEST(Rng, Uniform01StaysInUnitInterval) {
  auto s = SeededRng(1).stream();
  for (int i = 0; i < 10000; ++i) {
    double u = s.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, NormalHasStandardMoments) {
  auto s = SeededRng(3).stream();
  const int n = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = s.normal();
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 3.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(var, 1.0, 3.0 * std::sqrt(2.0 / n) + 0.01);
}

TEST(Rng, IndexStaysInRangeAndCoversIt) {
  auto s = SeededRng(5).stream();
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(s.index(7));
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(*seen.rbegin(), 6u);
  EXPECT_EQ(s.index(1), 0u);
}

TEST(Rng, ShuffleIsAPermutationAndDeterministic) {
  std::vector<int> v(20);
  for (int i = 0; i < 20; ++i) v[i] = i;
  auto w = v;
  auto s1 = SeededRng(9).stream();
  auto s2 = SeededRng(9).stream();
  s1.shuffle(v);
  s2.shuffle(w);
  EXPECT_EQ(v, w);
  std::sort(w.begin(), w.end());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(w[i], i);
}

Dataset tiny_dataset() {
  Dataset d;
  d.features = Matrix::from_rows({{0.0, 1.0},
                                  {1.0, 0.0},
                                  {2.0, 1.0},
                                  {3.0, 0.0},
                                  {4.0, 1.0},
                                  {5.0, 0.0},
                                  {6.0, 1.0},
                                  {7.0, 0.0},
                                  {8.0, 1.0},
                                  {9.0, 0.0}});
  d.labels = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
  d.num_classes = 2;
  return d;
}

TEST(Dataset, ValidateCatchesShapeAndRangeProblems) {
  Dataset d = tiny_dataset();
  EXPECT_NO_THROW(d.validate());
  d.labels[0] = 5;
  EXPECT_THROW(d.validate(), mts::InputError);
  d = tiny_dataset();
  d.labels.pop_back();
  EXPECT_THROW(d.validate(), mts::ShapeError);
  d = tiny_dataset();
  d.features.at(2, 1) = std::nan("");
  EXPECT_THROW(d.validate(), mts::InputError);
  d = tiny_dataset();
  d.num_classes = 1;
  EXPECT_THROW(d.validate(), mts::InputError);
}

TEST(Split, StratifiedKeepsProportionsAndPartitions) {
  Dataset d = tiny_dataset();  // 6 of class 0, 4 of class 1
  auto [train, test] = stratified_split(d, 0.5, SeededRng(11));
  EXPECT_EQ(test.size(), 5u);   // 3 + 2
  EXPECT_EQ(train.size(), 5u);  // 3 + 2
  auto tr = train.class_counts(), te = test.class_counts();
  EXPECT_EQ(tr[0], 3u);
  EXPECT_EQ(tr[1], 2u);
  EXPECT_EQ(te[0], 3u);
  EXPECT_EQ(te[1], 2u);
  // Partition: first features are unique ids here, so recover row identity.
  std::set<double> ids;
  for (std::size_t i = 0; i < train.size(); ++i)
    ids.insert(train.features.at(i, 0));
  for (std::size_t i = 0; i < test.size(); ++i)
    ids.insert(test.features.at(i, 0));
  EXPECT_EQ(ids.size(), 10u);
}

TEST(Split, EveryClassAppearsOnBothSidesEvenWhenTiny) {
  Dataset d = tiny_dataset();
  // 10% of 4 instances rounds to 0; the clamp must still reserve one.
  auto [train, test] = stratified_split(d, 0.1, SeededRng(2));
  EXPECT_GE(test.class_counts()[1], 1u);
  EXPECT_GE(train.class_counts()[1], 1u);
}

TEST(Split, RejectsDegenerateAndOutOfRangeInput) {
  Dataset d = tiny_dataset();
  d.labels[9] = 0;
  d.labels[8] = 0;
  d.labels[7] = 0;
  d.labels[6] = 0;
  d.labels[5] = 1;  // class 1 now has a single instance
  EXPECT_THROW(stratified_split(d, 0.5, SeededRng(1)),
               mts::DegenerateInputError);
  EXPECT_THROW(stratified_split(tiny_dataset(), 0.0, SeededRng(1)),
               mts::InputError);
  EXPECT_THROW(stratified_split(tiny_dataset(), 1.0, SeededRng(1)),
               mts::InputError);
}

TEST(Split, DeterministicForFixedSeed) {
  Dataset d = tiny_dataset();
  auto [tr1, te1] = stratified_split(d, 0.4, SeededRng(33));
  auto [tr2, te2] = stratified_split(d, 0.4, SeededRng(33));
  EXPECT_EQ(tr1.labels, tr2.labels);
  EXPECT_EQ(te1.features.data(), te2.features.data());
}

TEST(FlipLabels, RateZeroAndOneAreExact) {
  Dataset d = tiny_dataset();
  Dataset same = flip_labels(d, 0.0, SeededRng(4));
  EXPECT_EQ(same.labels, d.labels);
  Dataset flipped = flip_labels(d, 1.0, SeededRng(4));
  for (std::size_t i = 0; i < d.size(); ++i)
    EXPECT_NE(flipped.labels[i], d.labels[i]);
}

TEST(FlipLabels, FlipCountIsStatisticallyPlausible) {
  Dataset d;
  const int n = 10000;
  d.features = Matrix(n, 1, 0.0);
  d.labels.assign(n, 0);
  d.num_classes = 3;
  const double rate = 0.3;
  Dataset noisy = flip_labels(d, rate, SeededRng(17));
  int flips = 0;
  std::vector<int> target_counts(3, 0);
  for (int i = 0; i < n; ++i) {
    if (noisy.labels[i] != 0) {
      ++flips;
      ++target_counts[noisy.labels[i]];
    }
  }
  double sigma = std::sqrt(n * rate * (1.0 - rate));
  EXPECT_NEAR(flips, n * rate, 3.0 * sigma);
  // Flips split roughly evenly between the two other classes.
  EXPECT_NEAR(target_counts[1], flips / 2.0,
              3.0 * std::sqrt(flips * 0.25) + 1.0);
}

TEST(FlipLabels, RejectsOutOfRangeRate) {
  EXPECT_THROW(flip_labels(tiny_dataset(), -0.1, SeededRng(1)),
               mts::InputError);
  EXPECT_THROW(flip_labels(tiny_dataset(), 1.1, SeededRng(1)),
               mts::InputError);
}

TEST(Normalize, UsesTrainPopulationStatistics) {
  Dataset train;
  train.features = Matrix::from_rows({{3.0, 5.0}, {7.0, 5.0}});
  train.labels = {0, 1};
  train.num_classes = 2;
  Dataset test;
  test.features = Matrix::from_rows({{9.0, 2.0}});
  test.labels = {0};
  test.num_classes = 2;
  auto [ntr, nte] = z_normalize(train, test);
  // Column 0: mean 5, population sd 2 -> (3,7) become (-1,1) and 9 becomes 2.
  EXPECT_DOUBLE_EQ(ntr.features.at(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(ntr.features.at(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(nte.features.at(0, 0), 2.0);
  // Column 1 has zero variance -> all zeros, including the unseen test value.
  EXPECT_DOUBLE_EQ(ntr.features.at(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(ntr.features.at(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(nte.features.at(0, 1), 0.0);
}

TEST(Votes, CountsAndMajorityWithTieToLowest) {
  std::vector<int> row = {0, 1, 1, 2, 0};
  auto p = mts::vote_counts(row, 3);
  EXPECT_EQ(p.total, 5);
  EXPECT_EQ(p.counts, (std::vector<int>{2, 2, 1}));
  EXPECT_EQ(mts::majority_label(p), 0);  // tie between 0 and 1
  std::vector<int> bad = {0, 3};
  EXPECT_THROW(mts::vote_counts(bad, 3), mts::InputError);
}

TEST(Votes, AccuracyCountsMatches) {
  std::vector<int> pred = {0, 1, 1, 0}, truth = {0, 1, 0, 0};
  EXPECT_DOUBLE_EQ(mts::accuracy(pred, truth), 0.75);
  std::vector<int> shorter = {0, 1};
  EXPECT_THROW(mts::accuracy(pred, shorter), mts::ShapeError);
}

TEST(Votes, DisagreementThresholdTable) {
  mts::DisagreementPolicy policy;
  auto profile = [](std::vector<int> counts) {
    mts::VoteProfile p;
    p.total = 0;
    for (int c : counts) p.total += c;
    p.counts = std::move(counts);
    return p;
  };
  // Binary, 15 votes: high iff the top count is at most 9.
  EXPECT_TRUE(mts::is_high_disagreement(profile({9, 6}), 2, policy));
  EXPECT_FALSE(mts::is_high_disagreement(profile({10, 5}), 2, policy));
  // Three classes: threshold 6.
  EXPECT_TRUE(mts::is_high_disagreement(profile({6, 6, 3}), 3, policy));
  EXPECT_FALSE(mts::is_high_disagreement(profile({7, 5, 3}), 3, policy));
  // Four classes: threshold 6.
  EXPECT_TRUE(mts::is_high_disagreement(profile({6, 4, 3, 2}), 4, policy));
  EXPECT_FALSE(mts::is_high_disagreement(profile({7, 4, 2, 2}), 4, policy));
  // Six classes: threshold 5.
  EXPECT_TRUE(mts::is_high_disagreement(profile({5, 4, 3, 1, 1, 1}), 6, policy));
  EXPECT_FALSE(
      mts::is_high_disagreement(profile({6, 3, 3, 1, 1, 1}), 6, policy));
  // Ten classes: threshold 3.
  EXPECT_TRUE(mts::is_high_disagreement(
      profile({3, 3, 3, 2, 1, 1, 1, 1, 0, 0}), 10, policy));
  EXPECT_FALSE(mts::is_high_disagreement(
      profile({4, 3, 2, 2, 1, 1, 1, 1, 0, 0}), 10, policy));
}

TEST(Votes, DisagreementPolicyErrorsAndOverride) {
  auto profile = [](std::vector<int> counts) {
    mts::VoteProfile p;
    p.total = 0;
    for (int c : counts) p.total += c;
    p.counts = std::move(counts);
    return p;
  };
  // Unlisted class count without an override.
  EXPECT_THROW(
      mts::is_high_disagreement(profile({5, 4, 3, 2, 1}), 5, {}),
      mts::ConfigurationError);
  // Ensemble size other than 15 without an override.
  EXPECT_THROW(mts::is_high_disagreement(profile({4, 3}), 2, {}),
               mts::ConfigurationError);
  mts::DisagreementPolicy override_policy{.max_count = 4};
  EXPECT_TRUE(mts::is_high_disagreement(profile({4, 3}), 2, override_policy));
  EXPECT_FALSE(mts::is_high_disagreement(profile({5, 2}), 2, override_policy));
  mts::DisagreementPolicy bad{.max_count = 20};
  EXPECT_THROW(mts::is_high_disagreement(profile({4, 3}), 2, bad),
               mts::ConfigurationError);
}

TEST(Decision, PicksLargestPositiveGap) {
  auto d = mts::decide_surprising({0.5, 0.3, 0.2}, {0.4, 0.45, 0.15}, 0);
  EXPECT_EQ(d.c_sat, (std::vector<int>{1}));
  EXPECT_EQ(d.answer, 1);
  EXPECT_TRUE(d.followed_minority);
}

TEST(Decision, FallsBackToMajorityWhenNothingIsSurprising) {
  auto d = mts::decide_surprising({0.6, 0.4}, {0.6, 0.4}, 0);
  EXPECT_TRUE(d.c_sat.empty());
  EXPECT_EQ(d.answer, 0);
  EXPECT_FALSE(d.followed_minority);
}

TEST(Decision, GapTieResolvesToLowestIndex) {
  // Dyadic values so the two gaps are exactly equal in floating point.
  auto d = mts::decide_surprising({0.25, 0.5, 0.75}, {0.5, 0.75, 0.25}, 2);
  EXPECT_EQ(d.c_sat, (std::vector<int>{0, 1}));
  EXPECT_EQ(d.answer, 0);
  EXPECT_TRUE(d.followed_minority);
}

TEST(Decision, ValidatesShapes) {
  EXPECT_THROW(mts::decide_surprising({0.5}, {0.5}, 0), mts::InputError);
  EXPECT_THROW(mts::decide_surprising({0.5, 0.5}, {0.5}, 0), mts::ShapeError);
  EXPECT_THROW(mts::decide_surprising({0.5, 0.5}, {0.5, 0.5}, 2),
               mts::InputError);
}

TEST(Matrix, FromRowsRejectsRaggedInput) {
  EXPECT_THROW(Matrix::from_rows({{1.0, 2.0}, {3.0}}), mts::ShapeError);
  Matrix m = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 2u);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 3.0);
  auto r = m.row(0);
  EXPECT_DOUBLE_EQ(r[1], 2.0);
}

TEST(PredictionMatrixTest, RowAccessMatchesEntries) {
  mts::PredictionMatrix pm(2, 3, 4);
  pm.at(0, 0) = 1;
  pm.at(0, 2) = 3;
  pm.at(1, 1) = 2;
  auto row0 = pm.row(0);
  EXPECT_EQ(row0[0], 1);
  EXPECT_EQ(row0[1], 0);
  EXPECT_EQ(row0[2], 3);
  EXPECT_EQ(pm.row(1)[1], 2);
  EXPECT_EQ(pm.num_classes(), 4);
}

}  // namespace
