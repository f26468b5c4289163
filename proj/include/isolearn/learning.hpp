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

#ifndef ISOLEARN_LEARNING_HPP
#define ISOLEARN_LEARNING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "isolearn/error.hpp"
#include "isolearn/game.hpp"

namespace isolearn {

// Sufficient statistic of one optimistic-Hedge learner.
struct ContextLearnerState {
  std::vector<double> cumulative_loss;
  // Last loss routed to this learner; zero before the first update.
  std::vector<double> optimism_hint;
  std::uint64_t updates_applied = 0;

  bool operator==(const ContextLearnerState&) const = default;
};

// One optimistic multiplicative-weights learner per (player, context), all
// sharing a single step size.
//
// Play for a context is w[k] ∝ exp(-eta * (cumulative_loss[k] + hint[k])),
// evaluated in log space; the state never stores products of weights.
class LearnerBank {
 public:
  LearnerBank(int num_players, int num_contexts, int num_actions, double eta)
      : num_players_(num_players), num_contexts_(num_contexts), num_actions_(num_actions), eta_(eta) {
    if (num_players < 1 || num_contexts < 1 || num_actions < 1) {
      throw std::invalid_argument("LearnerBank: dimensions must be positive");
    }
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("LearnerBank: eta must lie in (0, 1]");
    ContextLearnerState fresh{std::vector<double>(static_cast<std::size_t>(num_actions), 0.0),
                              std::vector<double>(static_cast<std::size_t>(num_actions), 0.0), 0};
    states_.assign(static_cast<std::size_t>(num_players) * num_contexts, fresh);
  }

  int num_players() const { return num_players_; }
  int num_contexts() const { return num_contexts_; }
  int num_actions() const { return num_actions_; }
  double eta() const { return eta_; }

  const ContextLearnerState& state(int player, int context) const { return states_[slot(player, context)]; }

  MixedStrategy current_distribution(int player, int context) const {
    const auto& s = state(player, context);
    std::vector<double> p(static_cast<std::size_t>(num_actions_));
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = -eta_ * (s.cumulative_loss[k] + s.optimism_hint[k]);
    const double top = *std::max_element(p.begin(), p.end());
    double total = 0.0;
    for (double& v : p) {
      v = std::exp(v - top);
      total += v;
    }
    for (double& v : p) v /= total;
    return MixedStrategy(std::move(p));
  }

  // Feeds `loss` to the learner of (player, realized_context) only.
  void apply_update(int player, int realized_context, const LossVector& loss) {
    if (loss.size() != num_actions_) throw std::invalid_argument("apply_update: loss has wrong length");
    for (int k = 0; k < loss.size(); ++k) {
      if (!(std::abs(loss[static_cast<std::size_t>(k)]) <= 1.0 + kLossTolerance)) {
        throw std::invalid_argument("apply_update: loss entry outside [-1, 1]");
      }
    }
    auto& s = states_[slot(player, realized_context)];
    for (std::size_t k = 0; k < s.cumulative_loss.size(); ++k) {
      s.cumulative_loss[k] += loss[k];
      s.optimism_hint[k] = loss[k];
    }
    ++s.updates_applied;
  }

  nlohmann::json snapshot() const {
    nlohmann::json doc;
    doc["players"] = num_players_;
    doc["contexts"] = num_contexts_;
    doc["actions"] = num_actions_;
    doc["eta"] = eta_;
    nlohmann::json learners = nlohmann::json::array();
    for (int j = 0; j < num_players_; ++j) {
      for (int z = 0; z < num_contexts_; ++z) {
        const auto& s = state(j, z);
        learners.push_back({{"player", j},
                            {"context", z},
                            {"cumulative_loss", s.cumulative_loss},
                            {"hint", s.optimism_hint},
                            {"updates", s.updates_applied}});
      }
    }
    doc["learners"] = std::move(learners);
    return doc;
  }

  static LearnerBank from_snapshot(const nlohmann::json& doc) {
    try {
      LearnerBank bank(doc.at("players").get<int>(), doc.at("contexts").get<int>(), doc.at("actions").get<int>(),
                       doc.at("eta").get<double>());
      const auto& learners = doc.at("learners");
      if (learners.size() != bank.states_.size()) throw ConfigError("snapshot: wrong number of learners");
      for (const auto& entry : learners) {
        auto& s = bank.states_.at(bank.slot(entry.at("player").get<int>(), entry.at("context").get<int>()));
        s.cumulative_loss = entry.at("cumulative_loss").get<std::vector<double>>();
        s.optimism_hint = entry.at("hint").get<std::vector<double>>();
        s.updates_applied = entry.at("updates").get<std::uint64_t>();
        if (s.cumulative_loss.size() != static_cast<std::size_t>(bank.num_actions_) ||
            s.optimism_hint.size() != static_cast<std::size_t>(bank.num_actions_)) {
          throw ConfigError("snapshot: learner vector has wrong length");
        }
      }
      return bank;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("snapshot: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("snapshot: ") + e.what());
    }
  }

  bool operator==(const LearnerBank&) const = default;

 private:
  std::size_t slot(int player, int context) const {
    if (player < 0 || player >= num_players_) throw std::out_of_range("LearnerBank: player out of range");
    if (context < 0 || context >= num_contexts_) throw std::out_of_range("LearnerBank: context out of range");
    return static_cast<std::size_t>(player) * num_contexts_ + static_cast<std::size_t>(context);
  }

  int num_players_;
  int num_contexts_;
  int num_actions_;
  double eta_;
  std::vector<ContextLearnerState> states_;
};

struct RoundPlay {
  JointProfile profile;
  std::vector<LossVector> losses;
};

// One simultaneous round: every player plays from the learner of its predicted
// context, then every player's loss (computed at the realized context against
// the others' just-chosen strategies) updates the realized-context learner.
inline RoundPlay iso_grpo_round(LearnerBank& bank, std::span<const int> predictions, int realized_context,
                                const GameSpec& spec) {
  const int J = spec.num_players();
  if (predictions.size() != static_cast<std::size_t>(J)) {
    throw std::invalid_argument("iso_grpo_round: need one prediction per player");
  }
  if (bank.num_players() != J || bank.num_contexts() != spec.num_contexts() ||
      bank.num_actions() != spec.num_actions()) {
    throw std::invalid_argument("iso_grpo_round: bank does not match game dimensions");
  }
  spec.check_context(realized_context);

  RoundPlay out;
  out.profile.reserve(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    out.profile.push_back(bank.current_distribution(j, predictions[static_cast<std::size_t>(j)]));
  }
  out.losses.reserve(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    out.losses.push_back(loss_vector(spec, j, opponents_of(out.profile, j), realized_context));
  }
  for (int j = 0; j < J; ++j) bank.apply_update(j, realized_context, out.losses[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace isolearn

#endif  // ISOLEARN_LEARNING_HPP
