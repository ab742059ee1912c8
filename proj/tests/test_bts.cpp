#include <gtest/gtest.h>

#include <vector>

#include "mts/bts.hpp"
#include "mts/rng.hpp"

namespace {

using mts::bts::AgentReport;

TEST(Bts, PosteriorIsObservedFrequency) {
  std::vector<AgentReport> r = {{1, 0.9}, {0, 0.3}, {1, 0.6}};
  EXPECT_DOUBLE_EQ(mts::bts::posterior(r, 1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(mts::bts::posterior(r, 0), 1.0 / 3.0);
}

TEST(Bts, PriorAveragesStatedAndComplementBeliefs) {
  // (0.9 + (1 - 0.5) + 0.3) / 3 = 17/30.
  std::vector<AgentReport> r = {{1, 0.9}, {0, 0.5}, {1, 0.3}};
  EXPECT_DOUBLE_EQ(mts::bts::prior(r, 1), 17.0 / 30.0);
  EXPECT_DOUBLE_EQ(mts::bts::prior(r, 0), 13.0 / 30.0);
}

TEST(Bts, AnswersSurprisinglyPopularLabel) {
  // Posterior(1) = 2/3, Prior(1) = (0.9 + 0.4 + 0.2)/3 = 0.5: label 1 is
  // more popular than predicted even though belief values are modest.
  std::vector<AgentReport> r = {{1, 0.9}, {0, 0.6}, {1, 0.2}};
  auto d = mts::bts::decide(r);
  EXPECT_EQ(d.answer, 1);
  EXPECT_DOUBLE_EQ(d.posterior, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(d.prior, 0.5);
  EXPECT_FALSE(d.followed_minority);  // 1 is also the majority here

  // Flip the belief structure so label 0 becomes surprisingly popular.
  std::vector<AgentReport> r2 = {{1, 1.0}, {1, 1.0}, {0, 0.2}};
  auto d2 = mts::bts::decide(r2);
  // Posterior(0) = 1/3, Prior(0) = (0 + 0 + 0.2)/3 = 1/15 < 1/3.
  EXPECT_EQ(d2.answer, 0);
  EXPECT_TRUE(d2.followed_minority);
}

TEST(Bts, TieFallsBackToMajority) {
  // Prior(1) = (1 + 1 + 0)/3 = 2/3 = Posterior(1): majority label 1 wins.
  std::vector<AgentReport> r = {{1, 1.0}, {1, 1.0}, {0, 1.0}};
  auto d = mts::bts::decide(r);
  EXPECT_DOUBLE_EQ(d.prior, d.posterior);
  EXPECT_EQ(d.answer, 1);
  EXPECT_FALSE(d.followed_minority);

  // Tied votes and tied surprisal: lowest label.
  std::vector<AgentReport> even = {{1, 0.5}, {0, 0.5}};
  auto d2 = mts::bts::decide(even);
  EXPECT_DOUBLE_EQ(d2.prior, 0.5);
  EXPECT_DOUBLE_EQ(d2.posterior, 0.5);
  EXPECT_EQ(d2.answer, 0);
}

TEST(Bts, MulticlassHandCase) {
  std::vector<AgentReport> r = {{0, 0.6}, {1, 0.5}, {2, 0.9}};
  auto priors = mts::bts::priors(r, 3);
  EXPECT_NEAR(priors[0], 0.30, 1e-12);
  EXPECT_NEAR(priors[1], 0.25, 1e-12);
  EXPECT_NEAR(priors[2], 0.45, 1e-12);
  auto d = mts::bts::decide_multiclass(r, 3);
  // Posterior is uniform 1/3; classes 0 and 1 beat their prior, class 1 by
  // the larger gap.
  EXPECT_EQ(d.c_sat, (std::vector<int>{0, 1}));
  EXPECT_EQ(d.answer, 1);
  EXPECT_TRUE(d.followed_minority);
}

TEST(Bts, MulticlassPriorsAndPosteriorsSumToOne) {
  auto s = mts::SeededRng(40).stream();
  for (int trial = 0; trial < 200; ++trial) {
    int num_classes = 2 + static_cast<int>(s.index(5));
    std::size_t k = 2 + s.index(10);
    std::vector<AgentReport> r(k);
    for (auto& rep : r) {
      rep.label = static_cast<int>(s.index(num_classes));
      rep.peer_fraction = s.uniform01();
    }
    double prior_sum = 0.0, post_sum = 0.0;
    for (int c = 0; c < num_classes; ++c) {
      prior_sum += mts::bts::prior(r, c, num_classes);
      post_sum += mts::bts::posterior(r, c, num_classes);
    }
    ASSERT_NEAR(prior_sum, 1.0, 1e-12);
    ASSERT_NEAR(post_sum, 1.0, 1e-12);
  }
}

// Plain transcription of the binary rule, evaluated arithmetic-first, as an
// independent check of the vector-based decision path.
int brute_force_binary(const std::vector<AgentReport>& r) {
  int ones = 0;
  double belief_in_one = 0.0;
  for (const auto& rep : r) {
    ones += rep.label;
    belief_in_one += rep.label == 1 ? rep.peer_fraction : 1.0 - rep.peer_fraction;
  }
  double post = static_cast<double>(ones) / static_cast<double>(r.size());
  double pri = belief_in_one / static_cast<double>(r.size());
  if (pri < post) return 1;
  if (pri > post) return 0;
  return 2 * ones > static_cast<int>(r.size()) ? 1 : 0;
}

TEST(Bts, AgreesWithBruteForceOnExhaustiveSmallGrid) {
  const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (std::size_t k = 1; k <= 3; ++k) {
    std::vector<AgentReport> r(k);
    // Enumerate labels and belief levels by mixed-radix counting.
    std::size_t label_total = 1;
    for (std::size_t i = 0; i < k; ++i) label_total *= 2;
    std::size_t belief_total = 1;
    for (std::size_t i = 0; i < k; ++i) belief_total *= grid.size();
    for (std::size_t lbits = 0; lbits < label_total; ++lbits) {
      for (std::size_t code = 0; code < belief_total; ++code) {
        std::size_t rest = code;
        for (std::size_t i = 0; i < k; ++i) {
          r[i].label = static_cast<int>((lbits >> i) & 1);
          r[i].peer_fraction = grid[rest % grid.size()];
          rest /= grid.size();
        }
        ASSERT_EQ(mts::bts::decide(r).answer, brute_force_binary(r));
      }
    }
  }
}

TEST(Bts, RejectsBadReports) {
  std::vector<AgentReport> empty;
  EXPECT_THROW(mts::bts::decide(empty), mts::InputError);
  std::vector<AgentReport> bad_fraction = {{1, 1.5}};
  EXPECT_THROW(mts::bts::decide(bad_fraction), mts::InputError);
  std::vector<AgentReport> bad_label = {{2, 0.5}};
  EXPECT_THROW(mts::bts::decide(bad_label), mts::InputError);
  std::vector<AgentReport> ok = {{1, 0.5}};
  EXPECT_THROW(mts::bts::posterior(ok, 3, 2), mts::InputError);
}

}  // namespace
