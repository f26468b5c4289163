// Copyright 2026 The isolearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "isolearn/learning.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "isolearn/generators.hpp"
#include "isolearn/metrics.hpp"

namespace isolearn {
namespace {

TEST(LearnerBankTest, RejectsStepSizeOutsideUnitInterval) {
  EXPECT_THROW(LearnerBank(2, 1, 2, 0.0), std::invalid_argument);
  EXPECT_THROW(LearnerBank(2, 1, 2, 1.5), std::invalid_argument);
  EXPECT_NO_THROW(LearnerBank(2, 1, 2, 1.0));
}

TEST(LearnerBankTest, FreshLearnerIsUniform) {
  const LearnerBank bank(2, 3, 4, 0.3);
  const auto w = bank.current_distribution(1, 2);
  for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(w[static_cast<std::size_t>(k)], 0.25);
}

TEST(LearnerBankTest, DominatedActionVanishes) {
  const double eta = 0.7;
  const double M = 40.0;
  LearnerBank bank(1, 1, 2, eta);
  for (int i = 0; i < 40; ++i) bank.apply_update(0, 0, LossVector({0.0, 1.0}));
  // Drop the hint so only cumulative_loss = (0, M) matters.
  bank.apply_update(0, 0, LossVector({0.0, 0.0}));
  const auto w = bank.current_distribution(0, 0);
  EXPECT_GE(w[0], 1.0 - std::exp(-eta * M));
  EXPECT_GT(w[1], 0.0);
}

TEST(LearnerBankTest, MatchesClosedFormSoftmax) {
  LearnerBank bank(1, 1, 3, 0.5);
  // cumulative (0.2, -0.1, 0.4) with hint (0.1, 0.0, -0.1)
  bank.apply_update(0, 0, LossVector({0.1, -0.1, 0.5}));
  bank.apply_update(0, 0, LossVector({0.1, 0.0, -0.1}));
  const auto w = bank.current_distribution(0, 0);
  // Evaluated independently in double precision from the closed form.
  EXPECT_NEAR(w[0], 0.31042377345300559, 1e-15);
  EXPECT_NEAR(w[1], 0.37915245309398876, 1e-15);
  EXPECT_NEAR(w[2], 0.31042377345300559, 1e-15);
}

TEST(LearnerBankTest, UpdateTouchesOnlyRealizedContext) {
  LearnerBank bank(2, 2, 2, 0.5);
  const LearnerBank before = bank;
  bank.apply_update(0, 0, LossVector({0.3, -0.2}));
  EXPECT_EQ(bank.state(0, 1), before.state(0, 1));
  EXPECT_EQ(bank.state(1, 0), before.state(1, 0));
  EXPECT_EQ(bank.state(1, 1), before.state(1, 1));
  EXPECT_NE(bank.state(0, 0), before.state(0, 0));
  EXPECT_EQ(bank.state(0, 0).updates_applied, 1u);
}

TEST(LearnerBankTest, AccumulatesLossesAndKeepsLastAsHint) {
  LearnerBank bank(1, 1, 2, 0.5);
  bank.apply_update(0, 0, LossVector({0.25, -1.0}));
  bank.apply_update(0, 0, LossVector({0.5, 0.75}));
  const auto& s = bank.state(0, 0);
  EXPECT_EQ(s.cumulative_loss, (std::vector<double>{0.75, -0.25}));
  EXPECT_EQ(s.optimism_hint, (std::vector<double>{0.5, 0.75}));
  EXPECT_EQ(s.updates_applied, 2u);
}

TEST(LearnerBankTest, ZeroLossOnlyResetsHint) {
  const double eta = 0.4;
  LearnerBank bank(1, 1, 3, eta);
  bank.apply_update(0, 0, LossVector({0.2, -0.6, 0.9}));
  bank.apply_update(0, 0, LossVector({0.0, 0.0, 0.0}));
  const std::vector<double> cum{0.2, -0.6, 0.9};
  double total = 0.0;
  std::vector<double> expect(3);
  for (int k = 0; k < 3; ++k) total += (expect[static_cast<std::size_t>(k)] = std::exp(-eta * cum[static_cast<std::size_t>(k)]));
  const auto w = bank.current_distribution(0, 0);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(w[static_cast<std::size_t>(k)], expect[static_cast<std::size_t>(k)] / total, 1e-15);
}

TEST(LearnerBankTest, RejectsOutOfRangeLoss) {
  LearnerBank bank(1, 1, 2, 0.5);
  EXPECT_NO_THROW(bank.apply_update(0, 0, LossVector({1.0 + 5e-10, -1.0})));
  EXPECT_THROW(bank.apply_update(0, 0, LossVector({0.0, 0.0, 0.0})), std::invalid_argument);
  EXPECT_THROW(bank.apply_update(0, 1, LossVector({0.0, 0.0})), std::out_of_range);
}

TEST(LearnerBankTest, SnapshotRoundTripsExactly) {
  LearnerBank bank(2, 3, 3, 0.37);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    bank.apply_update(static_cast<int>(gen() % 2), static_cast<int>(gen() % 3), LossVector({u(gen), u(gen), u(gen)}));
  }
  const LearnerBank back = LearnerBank::from_snapshot(nlohmann::json::parse(bank.snapshot().dump()));
  EXPECT_EQ(back, bank);
  auto bad = bank.snapshot();
  bad["learners"].erase(0);
  EXPECT_THROW(LearnerBank::from_snapshot(bad), ConfigError);
}

TEST(IsoGrpoRoundTest, FirstRoundIsUniformPlay) {
  const GameSpec g = generators::random_bilinear(3, 3, 2, 2, 4);
  LearnerBank bank(3, 2, 3, 0.5);
  const std::vector<int> pred{1, 1, 1};
  const RoundPlay play = iso_grpo_round(bank, pred, 1, g);
  const std::vector<MixedStrategy> uni{MixedStrategy::uniform(3), MixedStrategy::uniform(3)};
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(play.profile[static_cast<std::size_t>(j)], MixedStrategy::uniform(3));
    EXPECT_EQ(play.losses[static_cast<std::size_t>(j)], loss_vector(g, j, uni, 1));
  }
}

TEST(IsoGrpoRoundTest, PlaysPredictedUpdatesRealized) {
  const GameSpec g = generators::random_bilinear(2, 2, 2, 2, 8);
  LearnerBank bank(2, 2, 2, 0.5);
  // Make context 1's learner for player 0 distinct from context 0's.
  bank.apply_update(0, 1, LossVector({1.0, -1.0}));
  const LearnerBank before = bank;
  const std::vector<int> pred{1, 0};
  const RoundPlay play = iso_grpo_round(bank, pred, 0, g);
  EXPECT_EQ(play.profile[0], before.current_distribution(0, 1));
  EXPECT_EQ(play.profile[1], before.current_distribution(1, 0));
  EXPECT_EQ(bank.state(0, 1), before.state(0, 1));
  EXPECT_EQ(bank.state(0, 0).updates_applied, 1u);
  EXPECT_EQ(bank.state(0, 0).optimism_hint, std::vector<double>(play.losses[0].values().begin(), play.losses[0].values().end()));
}

TEST(IsoGrpoRoundTest, SimultaneousMoveUsesPreRoundBank) {
  const GameSpec g = generators::random_bilinear(2, 3, 2, 1, 21);
  LearnerBank bank(2, 1, 3, 1.0);
  const std::vector<int> pred{0, 0};
  iso_grpo_round(bank, pred, 0, g);
  const LearnerBank before = bank;
  const RoundPlay play = iso_grpo_round(bank, pred, 0, g);
  // Player 1's loss is computed against player 0's pre-update strategy.
  const std::vector<MixedStrategy> opp{before.current_distribution(0, 0)};
  EXPECT_EQ(play.losses[1], loss_vector(g, 1, opp, 0));
}

TEST(IsoGrpoRoundTest, RejectsBadPredictions) {
  const GameSpec g = generators::random_bilinear(2, 2, 1, 2, 1);
  LearnerBank bank(2, 2, 2, 0.5);
  EXPECT_THROW(iso_grpo_round(bank, std::vector<int>{0}, 0, g), std::invalid_argument);
  EXPECT_THROW(iso_grpo_round(bank, std::vector<int>{0, 2}, 0, g), std::out_of_range);
  EXPECT_THROW(iso_grpo_round(bank, std::vector<int>{0, 0}, 2, g), std::out_of_range);
}

// Deviation gain of the better-off player at profile (p, q) in matching pennies.
double max_deviation_gain(const GameSpec& g, double p, double q) {
  const JointProfile w{MixedStrategy({p, 1.0 - p}), MixedStrategy({q, 1.0 - q})};
  double gain = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double cost = expected_cost(g, j, w, 0);
    for (int k = 0; k < 2; ++k) {
      JointProfile dev = w;
      dev[static_cast<std::size_t>(j)] = MixedStrategy::pure(2, k);
      gain = std::max(gain, cost - expected_cost(g, j, dev, 0));
    }
  }
  return gain;
}

TEST(IsoGrpoRoundTest, MatchingPenniesAveragesNearEquilibrium) {
  const GameSpec g = generators::matching_pennies();
  // Brute-force check: on a 0.05 grid only (0.5, 0.5) is an equilibrium.
  int equilibria = 0;
  for (int a = 0; a <= 20; ++a) {
    for (int b = 0; b <= 20; ++b) {
      if (max_deviation_gain(g, a / 20.0, b / 20.0) <= 1e-12) {
        ++equilibria;
        EXPECT_EQ(a, 10);
        EXPECT_EQ(b, 10);
      }
    }
  }
  EXPECT_EQ(equilibria, 1);

  LearnerBank bank(2, 1, 2, 0.5);
  const std::vector<int> pred{0, 0};
  std::vector<double> avg(2, 0.0);
  for (int t = 0; t < 100; ++t) {
    const RoundPlay play = iso_grpo_round(bank, pred, 0, g);
    avg[0] += play.profile[0][0] / 100.0;
    avg[1] += play.profile[1][0] / 100.0;
  }
  EXPECT_NEAR(avg[0], 0.5, 0.1);
  EXPECT_NEAR(avg[1], 0.5, 0.1);
}

TEST(LearningProperties, RoutingSeparationEveryRound) {
  const GameSpec g = generators::random_bilinear(3, 2, 2, 4, 77);
  LearnerBank bank(3, 4, 2, 0.3);
  std::mt19937_64 gen(6);
  for (int t = 0; t < 2000; ++t) {
    const LearnerBank before = bank;
    const int z = static_cast<int>(gen() % 4);
    const std::vector<int> pred{static_cast<int>(gen() % 4), static_cast<int>(gen() % 4), static_cast<int>(gen() % 4)};
    iso_grpo_round(bank, pred, z, g);
    for (int j = 0; j < 3; ++j) {
      for (int c = 0; c < 4; ++c) {
        if (c == z) {
          ASSERT_EQ(bank.state(j, c).updates_applied, before.state(j, c).updates_applied + 1);
        } else {
          ASSERT_EQ(bank.state(j, c), before.state(j, c));
        }
      }
    }
  }
}

TEST(LearningProperties, DistributionStaysOnSimplexUnderExtremeLosses) {
  LearnerBank bank(1, 1, 3, 1.0);
  for (int t = 0; t < 100000; ++t) {
    const double s = (t % 7 == 0) ? -1.0 : 1.0;
    bank.apply_update(0, 0, LossVector({s, -s, 1.0}));
    if (t % 1000 == 0 || t == 99999) {
      const auto w = bank.current_distribution(0, 0);
      double total = 0.0;
      for (double p : w.probs()) {
        ASSERT_TRUE(std::isfinite(p));
        ASSERT_GE(p, 0.0);
        total += p;
      }
      ASSERT_NEAR(total, 1.0, 1e-9);
    }
  }
}

// With a constant loss fed to one learner, each round's regret is
// non-negative and the running total stays below the optimistic-FTRL
// guarantee log K / eta + eta * ||l - 0||_inf^2; the second term is the
// first round's hint error.
TEST(LearningProperties, ConstantLossRegretStaysBounded) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double eta : {0.1, 0.5, 1.0}) {
    for (int K = 2; K <= 4; ++K) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> l(static_cast<std::size_t>(K));
        double sup = 0.0;
        for (double& v : l) sup = std::max(sup, std::abs(v = u(gen)));
        const double best = *std::min_element(l.begin(), l.end());
        LearnerBank bank(1, 1, K, eta);
        double regret = 0.0;
        for (int t = 0; t < 3000; ++t) {
          const double step = dot(bank.current_distribution(0, 0).probs(), l) - best;
          ASSERT_GE(step, -1e-15);
          regret += step;
          bank.apply_update(0, 0, LossVector(l));
        }
        EXPECT_LE(regret, std::log(K) / eta + eta * sup * sup + 1e-9);
      }
    }
  }
}

TEST(LearningProperties, Deterministic) {
  const GameSpec g = generators::random_bilinear(2, 3, 2, 2, 5);
  auto run = [&] {
    LearnerBank bank(2, 2, 3, 0.5);
    for (int t = 0; t < 500; ++t) {
      const std::vector<int> pred{t % 2, (t / 3) % 2};
      iso_grpo_round(bank, pred, (t / 2) % 2, g);
    }
    return bank;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace isolearn
