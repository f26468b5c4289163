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

#ifndef ISOLEARN_METRICS_HPP
#define ISOLEARN_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "isolearn/error.hpp"
#include "isolearn/game.hpp"

namespace isolearn {

// Everything observed in one round; `round` is 0-based.
struct RoundRecord {
  int round = 0;
  int realized_context = 0;
  std::vector<int> predictions;
  JointProfile strategies;
  std::vector<LossVector> losses;
};

struct Trace {
  int num_players = 0;
  int num_actions = 0;
  int num_contexts = 0;
  int horizon = 0;
  std::vector<RoundRecord> rounds;
};

// Metric operations only accept finished runs.
inline void require_complete(const Trace& trace) {
  if (trace.horizon < 1) throw std::invalid_argument("trace: horizon must be >= 1");
  if (trace.rounds.size() != static_cast<std::size_t>(trace.horizon)) {
    std::ostringstream msg;
    msg << "trace: " << trace.rounds.size() << " rounds recorded, horizon is " << trace.horizon;
    throw std::invalid_argument(msg.str());
  }
}

namespace detail {

inline void check_player(const Trace& trace, int player) {
  if (player < 0 || player >= trace.num_players) throw std::out_of_range("metrics: player out of range");
}

inline void check_context(const Trace& trace, int context) {
  if (context < 0 || context >= trace.num_contexts) throw std::out_of_range("metrics: context out of range");
}

inline int argmin_lowest(std::span<const double> values) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(values.size()); ++k) {
    if (values[static_cast<std::size_t>(k)] < values[static_cast<std::size_t>(best)]) best = k;
  }
  return best;
}

inline double played_loss(const RoundRecord& r, int player) {
  return dot(r.strategies[static_cast<std::size_t>(player)].probs(),
             r.losses[static_cast<std::size_t>(player)].values());
}

}  // namespace detail

// Summed loss vector of `player` over rounds whose realized context is `context`
// (all rounds when context < 0).
inline std::vector<double> summed_losses(const Trace& trace, int player, int context = -1) {
  std::vector<double> total(static_cast<std::size_t>(trace.num_actions), 0.0);
  for (const auto& r : trace.rounds) {
    if (context >= 0 && r.realized_context != context) continue;
    const auto& l = r.losses[static_cast<std::size_t>(player)];
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += l[k];
  }
  return total;
}

// Minimizer of the summed linear loss over the simplex on one context's
// subsequence. Always a vertex; ties go to the lowest action, and an empty
// subsequence yields action 0.
inline MixedStrategy best_per_context_comparator(const Trace& trace, int player, int context) {
  require_complete(trace);
  detail::check_player(trace, player);
  detail::check_context(trace, context);
  const auto total = summed_losses(trace, player, context);
  return MixedStrategy::pure(trace.num_actions, detail::argmin_lowest(total));
}

// <w_t, l_t> - <pi*(Z_t), l_t> for every round.
inline std::vector<double> instantaneous_regret(const Trace& trace, int player) {
  require_complete(trace);
  detail::check_player(trace, player);
  std::vector<int> best(static_cast<std::size_t>(trace.num_contexts));
  for (int z = 0; z < trace.num_contexts; ++z) {
    best[static_cast<std::size_t>(z)] = detail::argmin_lowest(summed_losses(trace, player, z));
  }
  std::vector<double> out;
  out.reserve(trace.rounds.size());
  for (const auto& r : trace.rounds) {
    const auto& l = r.losses[static_cast<std::size_t>(player)];
    out.push_back(detail::played_loss(r, player) -
                  l[static_cast<std::size_t>(best[static_cast<std::size_t>(r.realized_context)])]);
  }
  return out;
}

inline double contextual_regret(const Trace& trace, int player) {
  const auto terms = instantaneous_regret(trace, player);
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

// Regret against the single best fixed action over the whole horizon.
inline double external_regret(const Trace& trace, int player) {
  require_complete(trace);
  detail::check_player(trace, player);
  const auto total = summed_losses(trace, player);
  double played = 0.0;
  for (const auto& r : trace.rounds) played += detail::played_loss(r, player);
  return played - total[static_cast<std::size_t>(detail::argmin_lowest(total))];
}

// Sum of sup-norm differences between consecutive losses on the subsequence of
// rounds realized in `context`.
inline double within_context_variation(const Trace& trace, int player, int context) {
  require_complete(trace);
  detail::check_player(trace, player);
  detail::check_context(trace, context);
  double total = 0.0;
  const LossVector* prev = nullptr;
  for (const auto& r : trace.rounds) {
    if (r.realized_context != context) continue;
    const auto& l = r.losses[static_cast<std::size_t>(player)];
    if (prev != nullptr) {
      double gap = 0.0;
      for (int k = 0; k < l.size(); ++k) {
        gap = std::max(gap, std::abs(l[static_cast<std::size_t>(k)] - (*prev)[static_cast<std::size_t>(k)]));
      }
      total += gap;
    }
    prev = &l;
  }
  return total;
}

inline long long mistake_count(const Trace& trace, int player) {
  detail::check_player(trace, player);
  long long n = 0;
  for (const auto& r : trace.rounds) n += r.predictions[static_cast<std::size_t>(player)] != r.realized_context;
  return n;
}

struct BoundTerms {
  double term_a = 0.0;  // m log K / eta, per-context initialization
  double term_b = 0.0;  // 2 L_T / eta, mispredictions
  double term_c = 0.0;  // eta * sum_z Var(z), within-context variation
  double total = 0.0;
  // Same with the variation coefficient doubled (2 eta).
  double total_slack2 = 0.0;
};

inline BoundTerms rvu_bound(int num_contexts, int num_actions, double eta, double mistakes,
                            std::span<const double> variations) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("rvu_bound: eta must lie in (0, 1]");
  const double var = std::accumulate(variations.begin(), variations.end(), 0.0);
  BoundTerms b;
  b.term_a = std::log(static_cast<double>(num_actions)) / eta * num_contexts;
  b.term_b = 2.0 / eta * mistakes;
  b.term_c = eta * var;
  b.total = b.term_a + b.term_b + b.term_c;
  b.total_slack2 = b.term_a + b.term_b + 2.0 * b.term_c;
  return b;
}

inline constexpr double kMinEta = 1e-6;

// min(1, sqrt((m log K + L_T) / (sum Var + 1))), floored at kMinEta.
inline double eta_rule(int num_contexts, int num_actions, double mistakes, double sum_variation) {
  const double num = num_contexts * std::log(static_cast<double>(num_actions)) + mistakes;
  const double eta = std::sqrt(num / (sum_variation + 1.0));
  return std::clamp(eta, kMinEta, 1.0);
}

struct CceReport {
  std::vector<double> per_player;  // external regret / T
  double epsilon = 0.0;            // max over players
  double bound_rhs = 0.0;          // sum_j contextual regret / T
  double bound_rhs_max = 0.0;      // max_j contextual regret / T
  bool within_bound = true;        // epsilon <= bound_rhs + 1e-9
};

inline constexpr double kCceTolerance = 1e-9;

inline CceReport cce_epsilon(const Trace& trace) {
  require_complete(trace);
  const double T = trace.horizon;
  CceReport rep;
  rep.epsilon = -std::numeric_limits<double>::infinity();
  rep.bound_rhs_max = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < trace.num_players; ++j) {
    rep.per_player.push_back(external_regret(trace, j) / T);
    rep.epsilon = std::max(rep.epsilon, rep.per_player.back());
    const double ctx = contextual_regret(trace, j) / T;
    rep.bound_rhs += ctx;
    rep.bound_rhs_max = std::max(rep.bound_rhs_max, ctx);
  }
  rep.within_bound = rep.epsilon <= rep.bound_rhs + kCceTolerance;
  return rep;
}

struct PlayerMetrics {
  long long mistakes = 0;
  double contextual_regret = 0.0;
  double external_regret = 0.0;
  std::vector<double> variation;  // per context
  BoundTerms bound;
  bool exact_bound_ok = false;
  bool slack2_bound_ok = false;
  MixedStrategy average_strategy;
};

struct RunMetrics {
  double eta = 0.0;
  std::vector<PlayerMetrics> players;
  CceReport cce;
};

inline RunMetrics compute_run_metrics(const Trace& trace, double eta) {
  require_complete(trace);
  RunMetrics out;
  out.eta = eta;
  for (int j = 0; j < trace.num_players; ++j) {
    PlayerMetrics pm;
    pm.mistakes = mistake_count(trace, j);
    pm.contextual_regret = contextual_regret(trace, j);
    pm.external_regret = external_regret(trace, j);
    for (int z = 0; z < trace.num_contexts; ++z) pm.variation.push_back(within_context_variation(trace, j, z));
    pm.bound = rvu_bound(trace.num_contexts, trace.num_actions, eta, static_cast<double>(pm.mistakes),
                         pm.variation);
    pm.exact_bound_ok = pm.contextual_regret <= pm.bound.total;
    pm.slack2_bound_ok = pm.contextual_regret <= pm.bound.total_slack2;

    std::vector<double> avg(static_cast<std::size_t>(trace.num_actions), 0.0);
    for (const auto& r : trace.rounds) {
      const auto& w = r.strategies[static_cast<std::size_t>(j)];
      for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += w[k];
    }
    for (double& v : avg) v /= trace.horizon;
    pm.average_strategy = MixedStrategy(std::move(avg));
    out.players.push_back(std::move(pm));
  }
  out.cce = cce_epsilon(trace);
  return out;
}

}  // namespace isolearn

#endif  // ISOLEARN_METRICS_HPP
