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

// Brute-force reference implementations for small instances.
//
// Nothing here includes or calls into the rest of the library; inputs are
// plain vectors so that agreement with the primary code is an independent
// check. Speed is not a goal.

#ifndef ISOLEARN_ORACLE_HPP
#define ISOLEARN_ORACLE_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace isolearn::oracle {

class LimitExceeded : public std::length_error {
 public:
  explicit LimitExceeded(const char* what) : std::length_error(what) {}
};

struct SmallInstanceLimit {
  std::size_t max_joint_actions = 4096;
  std::size_t max_rounds = 512;
};

// features laid out [player][joint action][dim]; joint action index has
// player 0 as the most significant base-K digit.
struct DenseGame {
  int players = 0;
  int actions = 0;
  int dim = 0;
  std::vector<double> features;
  std::vector<std::vector<double>> contexts;
};

struct TraceRound {
  int context = 0;
  std::vector<std::vector<double>> strategies;  // [player][action]
  std::vector<std::vector<double>> losses;      // [player][action]
};

inline double brute_expected_cost(const DenseGame& game, int player, const std::vector<std::vector<double>>& profile,
                                  int context, SmallInstanceLimit limit = {}) {
  std::size_t joint_count = 1;
  for (int j = 0; j < game.players; ++j) {
    joint_count *= static_cast<std::size_t>(game.actions);
    if (joint_count > limit.max_joint_actions) throw LimitExceeded("brute_expected_cost: too many joint actions");
  }
  const std::vector<double>& z = game.contexts.at(static_cast<std::size_t>(context));
  double total = 0.0;
  for (std::size_t joint = 0; joint < joint_count; ++joint) {
    // Peel digits from the least significant (last) player.
    double prob = 1.0;
    std::size_t rest = joint;
    for (int j = game.players - 1; j >= 0; --j) {
      const std::size_t a = rest % static_cast<std::size_t>(game.actions);
      rest /= static_cast<std::size_t>(game.actions);
      prob *= profile.at(static_cast<std::size_t>(j)).at(a);
    }
    double inner = 0.0;
    const std::size_t base = (static_cast<std::size_t>(player) * joint_count + joint) * static_cast<std::size_t>(game.dim);
    for (int r = 0; r < game.dim; ++r) inner += game.features.at(base + static_cast<std::size_t>(r)) * z.at(static_cast<std::size_t>(r));
    total += prob * inner;
  }
  return total;
}

// Exhaustive search over the simplex grid {w : w = n / N, sum n = N} with
// N = round(1 / resolution). Returns the best grid point and its summed loss.
inline std::pair<std::vector<double>, double> grid_comparator(const std::vector<TraceRound>& trace, int player,
                                                              int context, double resolution,
                                                              SmallInstanceLimit limit = {}) {
  if (trace.size() > limit.max_rounds) throw LimitExceeded("grid_comparator: too many rounds");
  if (resolution < 0.01 - 1e-15) throw LimitExceeded("grid_comparator: resolution below 0.01");
  std::size_t K = 0;
  std::vector<double> summed;
  for (const auto& round : trace) {
    const auto& l = round.losses.at(static_cast<std::size_t>(player));
    if (summed.empty()) {
      K = l.size();
      summed.assign(K, 0.0);
    }
    if (round.context != context) continue;
    for (std::size_t k = 0; k < K; ++k) summed[k] += l[k];
  }
  if (K == 0) throw std::invalid_argument("grid_comparator: empty trace");
  if (K > 4) throw LimitExceeded("grid_comparator: more than 4 actions");

  const int N = static_cast<int>(std::lround(1.0 / resolution));
  std::vector<int> counts(K, 0);
  std::vector<double> best_w(K, 0.0);
  double best = std::numeric_limits<double>::infinity();

  // Recursive enumeration of compositions of N into K parts.
  auto visit = [&](auto&& self, std::size_t slot, int remaining) -> void {
    if (slot + 1 == K) {
      counts[slot] = remaining;
      double value = 0.0;
      for (std::size_t k = 0; k < K; ++k) value += static_cast<double>(counts[k]) / N * summed[k];
      if (value < best) {
        best = value;
        for (std::size_t k = 0; k < K; ++k) best_w[k] = static_cast<double>(counts[k]) / N;
      }
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[slot] = c;
      self(self, slot + 1, remaining - c);
    }
  };
  visit(visit, 0, N);
  return {best_w, best};
}

// max over players j and pure deviations k of
//   (1/T) sum_t ( <w_t^j, l_t^j> - l_t^j[k] ).
inline double exhaustive_cce_gap(const std::vector<TraceRound>& trace, SmallInstanceLimit limit = {}) {
  if (trace.empty()) throw std::invalid_argument("exhaustive_cce_gap: empty trace");
  if (trace.size() > limit.max_rounds) throw LimitExceeded("exhaustive_cce_gap: too many rounds");
  const std::size_t players = trace.front().losses.size();
  const std::size_t K = trace.front().losses.front().size();
  double gap = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < players; ++j) {
    for (std::size_t k = 0; k < K; ++k) {
      double acc = 0.0;
      for (const auto& round : trace) {
        double played = 0.0;
        for (std::size_t a = 0; a < K; ++a) played += round.strategies[j][a] * round.losses[j][a];
        acc += played - round.losses[j][k];
      }
      const double avg = acc / static_cast<double>(trace.size());
      if (avg > gap) gap = avg;
    }
  }
  return gap;
}

}  // namespace isolearn::oracle

#endif  // ISOLEARN_ORACLE_HPP
