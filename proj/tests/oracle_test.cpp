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


#include "isolearn/oracle.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "isolearn/game.hpp"
#include "isolearn/metrics.hpp"
#include "isolearn/oracle_bridge.hpp"
#include "test_util.hpp"

namespace isolearn {
namespace {

TEST(BruteExpectedCostTest, MatchesPrimaryOnRandomInstances) {
  std::mt19937_64 gen(1001);
  for (int trial = 0; trial < 1000; ++trial) {
    const GameSpec g = testing::random_game(gen, 3, 4, 4);
    const JointProfile w = testing::random_profile(gen, g.num_players(), g.num_actions());
    const int j = static_cast<int>(gen() % static_cast<std::uint64_t>(g.num_players()));
    const int z = static_cast<int>(gen() % static_cast<std::uint64_t>(g.num_contexts()));
    ASSERT_NEAR(oracle::brute_expected_cost(oracle::to_dense(g), j, oracle::to_plain(w), z),
                expected_cost(g, j, w, z), 1e-12);
  }
}

TEST(BruteExpectedCostTest, PointMassAndZeroFeatures) {
  const oracle::DenseGame g{2, 2, 1, {0.1, 0.2, 0.3, 0.4, -0.1, -0.2, -0.3, -0.4}, {{1.0}}};
  EXPECT_DOUBLE_EQ(oracle::brute_expected_cost(g, 1, {{0, 1}, {1, 0}}, 0), -0.3);
  const oracle::DenseGame zero{2, 3, 2, std::vector<double>(36, 0.0), {{0.5, 0.5}}};
  EXPECT_EQ(oracle::brute_expected_cost(zero, 0, {{1 / 3., 1 / 3., 1 / 3.}, {1 / 3., 1 / 3., 1 / 3.}}, 0), 0.0);
}

TEST(BruteExpectedCostTest, EnforcesLimit) {
  const oracle::DenseGame g{2, 2, 1, std::vector<double>(8, 0.0), {{1.0}}};
  EXPECT_THROW(oracle::brute_expected_cost(g, 0, {{1, 0}, {1, 0}}, 0, {3, 512}), oracle::LimitExceeded);
}

TEST(GridComparatorTest, ZeroLossesAndDominatedAction) {
  std::vector<oracle::TraceRound> zero{{0, {{0.5, 0.5}}, {{0.0, 0.0}}}};
  EXPECT_EQ(oracle::grid_comparator(zero, 0, 0, 0.05).second, 0.0);

  std::vector<oracle::TraceRound> dom{{0, {{1, 0, 0}}, {{0.9, 0.1, 0.1}}}, {0, {{1, 0, 0}}, {{0.8, 0.2, 0.0}}}};
  const auto [w, value] = oracle::grid_comparator(dom, 0, 0, 0.01);
  EXPECT_LE(w[0], 0.01);
  EXPECT_NEAR(value, 0.1, 1e-12);
}

// Every vertex is a grid point, so the grid optimum equals the vertex optimum.
TEST(GridComparatorTest, AgreesWithVertexComparator) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 2 + static_cast<int>(gen() % 3);
    const Trace tr = testing::random_trace(gen, 2, K, 2, 40);
    const auto plain = oracle::to_plain(tr);
    for (int z = 0; z < 2; ++z) {
      const auto sums = summed_losses(tr, 1, z);
      const double vertex = dot(best_per_context_comparator(tr, 1, z).probs(), sums);
      const double grid = oracle::grid_comparator(plain, 1, z, 0.01).second;
      EXPECT_NEAR(grid, vertex, 1e-9);
      EXPECT_GE(grid, vertex - 1e-12);
    }
  }
}

TEST(GridComparatorTest, EnforcesLimits) {
  std::vector<oracle::TraceRound> five{{0, {{0.2, 0.2, 0.2, 0.2, 0.2}}, {{0, 0, 0, 0, 0}}}};
  EXPECT_THROW(oracle::grid_comparator(five, 0, 0, 0.1), oracle::LimitExceeded);
  std::vector<oracle::TraceRound> two{{0, {{0.5, 0.5}}, {{0, 0}}}};
  EXPECT_THROW(oracle::grid_comparator(two, 0, 0, 0.001), oracle::LimitExceeded);
  EXPECT_THROW(oracle::grid_comparator(std::vector<oracle::TraceRound>(513, two[0]), 0, 0, 0.1), oracle::LimitExceeded);
}

TEST(ExhaustiveCceGapTest, MatchesPrimaryEpsilon) {
  std::mt19937_64 gen(200);
  for (int trial = 0; trial < 200; ++trial) {
    const Trace tr = testing::random_trace(gen, 2 + static_cast<int>(gen() % 2), 2 + static_cast<int>(gen() % 3),
                                           1 + static_cast<int>(gen() % 3), 1 + static_cast<int>(gen() % 100));
    ASSERT_NEAR(oracle::exhaustive_cce_gap(oracle::to_plain(tr)), cce_epsilon(tr).epsilon, 1e-12);
  }
}

TEST(ExhaustiveCceGapTest, ZeroAndSingleRound) {
  std::vector<oracle::TraceRound> zero{{0, {{0.5, 0.5}, {1, 0}}, {{0, 0}, {0, 0}}}};
  EXPECT_EQ(oracle::exhaustive_cce_gap(zero), 0.0);
  // Pure play of action 0 by both players.
  std::vector<oracle::TraceRound> one{{0, {{1, 0, 0}, {1, 0, 0}}, {{0.5, -0.5, 0.2}, {0.1, 0.3, 0.0}}}};
  EXPECT_DOUBLE_EQ(oracle::exhaustive_cce_gap(one), 1.0);
}

}  // namespace
}  // namespace isolearn
