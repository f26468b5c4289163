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

#ifndef ISOLEARN_GENERATORS_HPP
#define ISOLEARN_GENERATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "isolearn/game.hpp"
#include "isolearn/prediction.hpp"

namespace isolearn::generators {

namespace detail {

// Deterministic U[-1, 1) stream keyed by (seed, counter).
class SignedUniform {
 public:
  explicit SignedUniform(std::uint64_t seed) : seed_(seed) {}
  double operator()() { return 2.0 * rng::to_unit(rng::key(seed_, rng::kGame, counter_++)) - 1.0; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace detail

// Uniform random features and contexts, features rescaled so that the largest
// |<phi^j(a), z>| equals `scale` (<= 1).
inline GameSpec random_bilinear(int players, int actions, int dim, int contexts, std::uint64_t seed,
                                double scale = 1.0) {
  if (!(scale > 0.0 && scale <= 1.0)) throw ConfigError("random-bilinear: scale must lie in (0, 1]");
  if (players < 2 || actions < 2 || dim < 1 || contexts < 1) {
    throw ConfigError("random-bilinear: need players >= 2, actions >= 2, dim >= 1, contexts >= 1");
  }
  detail::SignedUniform draw(seed);
  std::size_t joint = 1;
  for (int j = 0; j < players; ++j) {
    joint *= static_cast<std::size_t>(actions);
    if (joint > kMaxJointActions) throw ConfigError("random-bilinear: joint action space too large");
  }
  std::vector<std::vector<double>> ctx(static_cast<std::size_t>(contexts), std::vector<double>(static_cast<std::size_t>(dim)));
  for (auto& z : ctx) {
    for (double& v : z) v = draw();
  }
  std::vector<double> features(static_cast<std::size_t>(players) * joint * static_cast<std::size_t>(dim));
  for (double& v : features) v = draw();

  double largest = 0.0;
  for (std::size_t f = 0; f < features.size(); f += static_cast<std::size_t>(dim)) {
    for (const auto& z : ctx) {
      double c = 0.0;
      for (int r = 0; r < dim; ++r) c += features[f + static_cast<std::size_t>(r)] * z[static_cast<std::size_t>(r)];
      largest = std::max(largest, std::abs(c));
    }
  }
  if (largest > 0.0) {
    for (double& v : features) v *= scale / largest;
  }
  return GameSpec(players, actions, dim, std::move(features), std::move(ctx));
}

// Two-player zero-sum game with a random K x K loss matrix A in [-1, 1]:
// player 0 pays A[a0][a1], player 1 pays -A[a0][a1]. d = 1 and context c
// scales the game by (-1)^c, so odd contexts swap the roles.
inline GameSpec zero_sum_2p(int actions, int contexts, std::uint64_t seed) {
  if (actions < 2 || contexts < 1) throw ConfigError("zero-sum-2p: need actions >= 2, contexts >= 1");
  detail::SignedUniform draw(seed);
  const auto K = static_cast<std::size_t>(actions);
  std::vector<double> a(K * K);
  for (double& v : a) v = draw();
  std::vector<double> features(2 * K * K);
  for (std::size_t i = 0; i < K * K; ++i) {
    features[i] = a[i];
    features[K * K + i] = -a[i];
  }
  std::vector<std::vector<double>> ctx;
  for (int c = 0; c < contexts; ++c) ctx.push_back({c % 2 == 0 ? 1.0 : -1.0});
  return GameSpec(2, actions, 1, std::move(features), std::move(ctx));
}

// Matching pennies: player 0 pays 1 on a match and -1 otherwise; zero-sum.
inline GameSpec matching_pennies() {
  return GameSpec(2, 2, 1, {1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0}, {{1.0}});
}

// Two players, three actions, two contexts. Feature 0 is an own-action
// preference u = (-1, 0, 1); feature 1 is a rock-paper-scissors loss against
// the opponent. Context 0 = (0.6, 0.4) favors action 0, context 1 =
// (-0.6, 0.4) favors action 2, so playing one context's learner in the other
// context is costly.
inline GameSpec cyclic_context_demo() {
  constexpr int K = 3;
  const double pref[K] = {-1.0, 0.0, 1.0};
  auto rps = [](int mine, int theirs) {
    const int diff = ((mine - theirs) % K + K) % K;
    return diff == 0 ? 0.0 : (diff == 1 ? -1.0 : 1.0);
  };
  std::vector<double> features;
  for (int j = 0; j < 2; ++j) {
    for (int a0 = 0; a0 < K; ++a0) {
      for (int a1 = 0; a1 < K; ++a1) {
        const int mine = j == 0 ? a0 : a1;
        const int theirs = j == 0 ? a1 : a0;
        features.push_back(pref[mine]);
        features.push_back(rps(mine, theirs));
      }
    }
  }
  return GameSpec(2, K, 2, std::move(features), {{0.6, 0.4}, {-0.6, 0.4}});
}

// Each player's loss depends only on its own action and the context:
// d = J*K, phi^j(a) = e_{j*K + a_j}, so l^j[k] = z[j*K + k] whatever the
// opponents do. Losses are therefore constant within every context.
inline GameSpec separable(int players, int actions, int contexts, std::uint64_t seed) {
  if (players < 2 || actions < 2 || contexts < 1) {
    throw ConfigError("separable: need players >= 2, actions >= 2, contexts >= 1");
  }
  detail::SignedUniform draw(seed);
  const int dim = players * actions;
  std::vector<std::vector<double>> ctx(static_cast<std::size_t>(contexts), std::vector<double>(static_cast<std::size_t>(dim)));
  for (auto& z : ctx) {
    for (double& v : z) v = draw();
  }
  std::size_t joint = 1;
  for (int j = 0; j < players; ++j) joint *= static_cast<std::size_t>(actions);
  std::vector<double> features(static_cast<std::size_t>(players) * joint * static_cast<std::size_t>(dim), 0.0);
  GameSpec shape(players, actions, dim, std::vector<double>(features.size(), 0.0), ctx);
  for (int j = 0; j < players; ++j) {
    for (std::size_t a = 0; a < joint; ++a) {
      const int own = shape.decode_joint(a)[static_cast<std::size_t>(j)];
      features[(static_cast<std::size_t>(j) * joint + a) * static_cast<std::size_t>(dim) +
               static_cast<std::size_t>(j * actions + own)] = 1.0;
    }
  }
  return GameSpec(players, actions, dim, std::move(features), std::move(ctx));
}

}  // namespace isolearn::generators

#endif  // ISOLEARN_GENERATORS_HPP
