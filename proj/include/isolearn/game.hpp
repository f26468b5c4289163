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

#ifndef ISOLEARN_GAME_HPP
#define ISOLEARN_GAME_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isolearn/error.hpp"

namespace isolearn {

inline constexpr double kSimplexTolerance = 1e-9;
inline constexpr double kLossTolerance = 1e-9;
// Slack on |<phi(a), z>| <= 1 so that generated games rescaled to hit the
// bound exactly are not rejected over the last ulp.
inline constexpr double kBoundTolerance = 1e-12;
inline constexpr std::size_t kMaxJointActions = 10'000'000;

// A probability vector over one player's K actions.
class MixedStrategy {
 public:
  MixedStrategy() = default;

  // Renormalizes when the sum is off by less than kSimplexTolerance, throws
  // std::invalid_argument otherwise or when an entry is negative/non-finite.
  explicit MixedStrategy(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("MixedStrategy: empty probability vector");
    double total = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
      const double p = probs_[k];
      if (!std::isfinite(p) || p < 0.0) {
        std::ostringstream msg;
        msg << "MixedStrategy: entry " << k << " = " << p << " is not a probability";
        throw std::invalid_argument(msg.str());
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "MixedStrategy: entries sum to " << total << ", not 1";
      throw std::invalid_argument(msg.str());
    }
    if (total != 1.0) {
      for (double& p : probs_) p /= total;
    }
  }

  static MixedStrategy uniform(int num_actions) {
    return MixedStrategy(std::vector<double>(static_cast<std::size_t>(num_actions), 1.0 / num_actions));
  }

  static MixedStrategy pure(int num_actions, int action) {
    std::vector<double> p(static_cast<std::size_t>(num_actions), 0.0);
    p.at(static_cast<std::size_t>(action)) = 1.0;
    return MixedStrategy(std::move(p));
  }

  std::span<const double> probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](std::size_t k) const { return probs_[k]; }

  bool operator==(const MixedStrategy&) const = default;

 private:
  std::vector<double> probs_;
};

// One MixedStrategy per player, read as the product distribution over joint
// actions.
using JointProfile = std::vector<MixedStrategy>;

// Per-action losses for one player; entries lie in [-1, 1].
class LossVector {
 public:
  LossVector() = default;

  explicit LossVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t k = 0; k < values_.size(); ++k) {
      const double v = values_[k];
      if (!std::isfinite(v) || std::abs(v) > 1.0 + kLossTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "LossVector: entry " << k << " = " << v << " outside [-1, 1]";
        throw std::invalid_argument(msg.str());
      }
    }
  }

  std::span<const double> values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](std::size_t k) const { return values_[k]; }

  bool operator==(const LossVector&) const = default;

 private:
  std::vector<double> values_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Dense d x K matrix, column k = expected feature vector of action k.
struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Thrown when |<phi^j(a), z>| > 1 for some (player, joint action, context).
class BoundViolation : public ConfigError {
 public:
  BoundViolation(int player, std::vector<int> joint_action, int context, double value)
      : ConfigError(describe(player, joint_action, context, value)),
        player_(player),
        joint_action_(std::move(joint_action)),
        context_(context),
        value_(value) {}

  int player() const { return player_; }
  const std::vector<int>& joint_action() const { return joint_action_; }
  int context() const { return context_; }
  double value() const { return value_; }

 private:
  static std::string describe(int player, const std::vector<int>& a, int context, double value) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "bounded-cost violation: |<features[" << player << "][(";
    for (std::size_t i = 0; i < a.size(); ++i) msg << (i ? "," : "") << a[i];
    msg << ")], contexts[" << context << "]>| = " << std::abs(value) << " > 1";
    return msg.str();
  }

  int player_;
  std::vector<int> joint_action_;
  int context_;
  double value_;
};

// Static definition of a latent-context bilinear game.
//
// Joint actions are indexed lexicographically with player 0 as the most
// significant base-K digit. Features are stored densely as
// [player][joint action][dim].
class GameSpec {
 public:
  GameSpec(int num_players, int num_actions, int feature_dim, std::vector<double> features,
           std::vector<std::vector<double>> contexts)
      : num_players_(num_players),
        num_actions_(num_actions),
        feature_dim_(feature_dim),
        features_(std::move(features)),
        contexts_(std::move(contexts)) {
    if (num_players_ < 2) throw ConfigError("game: players must be >= 2");
    if (num_actions_ < 2) throw ConfigError("game: actions must be >= 2");
    if (feature_dim_ < 1) throw ConfigError("game: dim must be >= 1");
    if (contexts_.empty()) throw ConfigError("game: at least one context is required");
    num_joint_ = 1;
    for (int j = 0; j < num_players_; ++j) {
      num_joint_ *= static_cast<std::size_t>(num_actions_);
      if (num_joint_ > kMaxJointActions) throw ConfigError("game: joint action space too large");
    }
    const std::size_t expected =
        static_cast<std::size_t>(num_players_) * num_joint_ * static_cast<std::size_t>(feature_dim_);
    if (features_.size() != expected) {
      std::ostringstream msg;
      msg << "game: features has " << features_.size() << " entries, expected " << expected;
      throw ConfigError(msg.str());
    }
    for (std::size_t z = 0; z < contexts_.size(); ++z) {
      if (contexts_[z].size() != static_cast<std::size_t>(feature_dim_)) {
        std::ostringstream msg;
        msg << "game: contexts[" << z << "] has length " << contexts_[z].size() << ", expected "
            << feature_dim_;
        throw ConfigError(msg.str());
      }
    }
    for (double v : features_) {
      if (!std::isfinite(v)) throw ConfigError("game: non-finite feature value");
    }
    for (const auto& z : contexts_) {
      for (double v : z) {
        if (!std::isfinite(v)) throw ConfigError("game: non-finite context value");
      }
    }
    validate_bounded_costs();
  }

  int num_players() const { return num_players_; }
  int num_actions() const { return num_actions_; }
  int feature_dim() const { return feature_dim_; }
  int num_contexts() const { return static_cast<int>(contexts_.size()); }
  std::size_t num_joint_actions() const { return num_joint_; }

  std::span<const double> features() const { return features_; }
  const std::vector<std::vector<double>>& contexts() const { return contexts_; }

  std::span<const double> feature(int player, std::size_t joint) const {
    const std::size_t offset =
        (static_cast<std::size_t>(player) * num_joint_ + joint) * static_cast<std::size_t>(feature_dim_);
    return std::span<const double>(features_).subspan(offset, static_cast<std::size_t>(feature_dim_));
  }

  std::span<const double> context(int z) const {
    check_context(z);
    return contexts_[static_cast<std::size_t>(z)];
  }

  std::size_t joint_index(std::span<const int> actions) const {
    if (actions.size() != static_cast<std::size_t>(num_players_)) {
      throw std::invalid_argument("joint_index: wrong number of actions");
    }
    std::size_t idx = 0;
    for (int a : actions) {
      if (a < 0 || a >= num_actions_) throw std::out_of_range("joint_index: action out of range");
      idx = idx * static_cast<std::size_t>(num_actions_) + static_cast<std::size_t>(a);
    }
    return idx;
  }

  std::vector<int> decode_joint(std::size_t joint) const {
    std::vector<int> actions(static_cast<std::size_t>(num_players_));
    for (int j = num_players_ - 1; j >= 0; --j) {
      actions[static_cast<std::size_t>(j)] = static_cast<int>(joint % static_cast<std::size_t>(num_actions_));
      joint /= static_cast<std::size_t>(num_actions_);
    }
    return actions;
  }

  // <phi^player(a), z> for one joint action.
  double cost(int player, std::size_t joint, int z) const { return dot(feature(player, joint), context(z)); }

  void check_player(int player) const {
    if (player < 0 || player >= num_players_) throw std::out_of_range("player index out of range");
  }
  void check_context(int z) const {
    if (z < 0 || z >= num_contexts()) throw std::out_of_range("context index out of range");
  }

 private:
  void validate_bounded_costs() const {
    for (int j = 0; j < num_players_; ++j) {
      for (std::size_t a = 0; a < num_joint_; ++a) {
        for (int z = 0; z < num_contexts(); ++z) {
          const double c = cost(j, a, z);
          if (std::abs(c) > 1.0 + kBoundTolerance) throw BoundViolation(j, decode_joint(a), z, c);
        }
      }
    }
  }

  int num_players_;
  int num_actions_;
  int feature_dim_;
  std::size_t num_joint_ = 0;
  std::vector<double> features_;
  std::vector<std::vector<double>> contexts_;
};

// Drops `player`'s entry from a full profile.
inline std::vector<MixedStrategy> opponents_of(const JointProfile& profile, int player) {
  std::vector<MixedStrategy> out;
  out.reserve(profile.size() - 1);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (static_cast<int>(i) != player) out.push_back(profile[i]);
  }
  return out;
}

namespace detail {

inline void check_strategies(const GameSpec& spec, std::span<const MixedStrategy> strategies,
                             std::size_t expected) {
  if (strategies.size() != expected) {
    std::ostringstream msg;
    msg << "profile has " << strategies.size() << " strategies, expected " << expected;
    throw std::invalid_argument(msg.str());
  }
  for (const auto& s : strategies) {
    if (s.size() != spec.num_actions()) throw std::invalid_argument("strategy has wrong number of actions");
  }
}

}  // namespace detail

// Phi^player(w^{-player}): column k is E[phi^player(a_k, a^{-player})] under the
// opponents' product distribution, by exact enumeration of K^J joint actions.
inline FeatureMatrix expected_feature_matrix(const GameSpec& spec, int player,
                                             std::span<const MixedStrategy> opponents) {
  spec.check_player(player);
  detail::check_strategies(spec, opponents, static_cast<std::size_t>(spec.num_players() - 1));

  const int J = spec.num_players();
  const int K = spec.num_actions();
  const int d = spec.feature_dim();
  FeatureMatrix phi{d, K, std::vector<double>(static_cast<std::size_t>(d) * K, 0.0)};

  // Odometer over joint actions in lexicographic order.
  std::vector<int> digits(static_cast<std::size_t>(J), 0);
  for (std::size_t joint = 0; joint < spec.num_joint_actions(); ++joint) {
    double weight = 1.0;
    for (int i = 0, o = 0; i < J; ++i) {
      if (i == player) continue;
      weight *= opponents[static_cast<std::size_t>(o++)][static_cast<std::size_t>(digits[static_cast<std::size_t>(i)])];
    }
    if (weight != 0.0) {
      const int k = digits[static_cast<std::size_t>(player)];
      const auto f = spec.feature(player, joint);
      for (int r = 0; r < d; ++r) phi.at(r, k) += weight * f[static_cast<std::size_t>(r)];
    }
    for (int i = J - 1; i >= 0; --i) {
      if (++digits[static_cast<std::size_t>(i)] < K) break;
      digits[static_cast<std::size_t>(i)] = 0;
    }
  }
  return phi;
}

// l^player(w^{-player}, z) = Phi^T z.
inline LossVector loss_vector(const GameSpec& spec, int player, std::span<const MixedStrategy> opponents,
                              int context) {
  spec.check_context(context);
  const FeatureMatrix phi = expected_feature_matrix(spec, player, opponents);
  const auto z = spec.context(context);
  std::vector<double> loss(static_cast<std::size_t>(phi.cols), 0.0);
  for (int k = 0; k < phi.cols; ++k) {
    double acc = 0.0;
    for (int r = 0; r < phi.rows; ++r) acc += phi.at(r, k) * z[static_cast<std::size_t>(r)];
    loss[static_cast<std::size_t>(k)] = acc;
  }
  return LossVector(std::move(loss));
}

// E_{a ~ w}[<phi^player(a), z>] by enumeration of every joint action.
inline double expected_cost(const GameSpec& spec, int player, const JointProfile& profile, int context) {
  spec.check_player(player);
  spec.check_context(context);
  detail::check_strategies(spec, profile, static_cast<std::size_t>(spec.num_players()));

  const int J = spec.num_players();
  const int K = spec.num_actions();
  std::vector<int> digits(static_cast<std::size_t>(J), 0);
  double total = 0.0;
  for (std::size_t joint = 0; joint < spec.num_joint_actions(); ++joint) {
    double prob = 1.0;
    for (int i = 0; i < J; ++i) {
      prob *= profile[static_cast<std::size_t>(i)][static_cast<std::size_t>(digits[static_cast<std::size_t>(i)])];
    }
    if (prob != 0.0) total += prob * spec.cost(player, joint, context);
    for (int i = J - 1; i >= 0; --i) {
      if (++digits[static_cast<std::size_t>(i)] < K) break;
      digits[static_cast<std::size_t>(i)] = 0;
    }
  }
  return total;
}

}  // namespace isolearn

#endif  // ISOLEARN_GAME_HPP
