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

#ifndef ISOLEARN_PREDICTION_HPP
#define ISOLEARN_PREDICTION_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "isolearn/error.hpp"

namespace isolearn {

// Counter-based random streams. Every draw is a pure function of its key, so
// results do not depend on evaluation order or thread assignment.
namespace rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t a = 0,
                                   std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ a);
  return splitmix64(h ^ b);
}

// Uniform in [0, 1) with 53 random bits.
inline constexpr double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n) by rejection, so n need not divide 2^64.
inline std::uint64_t below(std::uint64_t bits, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  while (bits >= limit) bits = splitmix64(bits);
  return bits % n;
}

enum Stream : std::uint64_t {
  kNoiseCoin = 1,
  kNoiseTarget = 2,
  kMarkov = 3,
  kGame = 4,
};

}  // namespace rng

struct OraclePredictor {};
// Wrong with probability p; a wrong guess is uniform over the other contexts.
struct NoisyPredictor {
  double p = 0.0;
};
struct ScriptedPredictor {
  std::vector<int> sequence;
};
// Most frequent realized context so far, lowest index on ties.
struct MajorityPredictor {};

using PredictorKind = std::variant<OraclePredictor, NoisyPredictor, ScriptedPredictor, MajorityPredictor>;

struct PredictorConfig {
  PredictorKind kind;
  std::uint64_t seed = 0;
  // Noise keyed by round only, so every player with this config sees the same corruption.
  bool shared_stream = false;
};

inline void validate_predictor(const PredictorConfig& config, int num_contexts, int horizon) {
  if (const auto* noisy = std::get_if<NoisyPredictor>(&config.kind)) {
    if (!(noisy->p >= 0.0 && noisy->p <= 1.0)) throw ConfigError("noisy predictor: p must lie in [0, 1]");
    if (noisy->p > 0.0 && num_contexts < 2) {
      throw ConfigError("noisy predictor: p > 0 needs at least two contexts");
    }
  } else if (const auto* script = std::get_if<ScriptedPredictor>(&config.kind)) {
    if (script->sequence.size() < static_cast<std::size_t>(horizon)) {
      throw ConfigError("scripted predictor: sequence shorter than horizon");
    }
    for (int z : script->sequence) {
      if (z < 0 || z >= num_contexts) throw ConfigError("scripted predictor: context index out of range");
    }
  }
}

// `round` is 0-based. `history` holds the realized contexts of rounds
// [0, round); only the oracle and noisy kinds read `realized_context`.
inline int predict(const PredictorConfig& config, int player, int round, int realized_context,
                   std::span<const int> history, int num_contexts) {
  struct Visitor {
    const PredictorConfig& config;
    int player, round, realized, num_contexts;
    std::span<const int> history;

    int operator()(const OraclePredictor&) const { return realized; }

    int operator()(const NoisyPredictor& noisy) const {
      if (noisy.p <= 0.0) return realized;
      const std::uint64_t who = config.shared_stream ? 0 : static_cast<std::uint64_t>(player) + 1;
      const auto r = static_cast<std::uint64_t>(round);
      const double coin = rng::to_unit(rng::key(config.seed, rng::kNoiseCoin, who, r));
      if (coin >= noisy.p) return realized;
      const auto pick = static_cast<int>(rng::below(rng::key(config.seed, rng::kNoiseTarget, who, r),
                                                    static_cast<std::uint64_t>(num_contexts - 1)));
      return pick >= realized ? pick + 1 : pick;
    }

    int operator()(const ScriptedPredictor& script) const {
      return script.sequence.at(static_cast<std::size_t>(round));
    }

    int operator()(const MajorityPredictor&) const {
      std::vector<int> counts(static_cast<std::size_t>(num_contexts), 0);
      for (int z : history) ++counts.at(static_cast<std::size_t>(z));
      int best = 0;
      for (int z = 1; z < num_contexts; ++z) {
        if (counts[static_cast<std::size_t>(z)] > counts[static_cast<std::size_t>(best)]) best = z;
      }
      return best;
    }
  };
  if (realized_context < 0 || realized_context >= num_contexts) {
    throw std::out_of_range("predict: realized context out of range");
  }
  return std::visit(Visitor{config, player, round, realized_context, num_contexts, history}, config.kind);
}

// Per-round misprediction flags and per-player counts L_T.
class MistakeLedger {
 public:
  MistakeLedger(int horizon, int num_players)
      : horizon_(horizon),
        num_players_(num_players),
        cells_(static_cast<std::size_t>(horizon) * num_players, kUnset),
        mistakes_(static_cast<std::size_t>(num_players), 0) {}

  void record(int round, int player, int predicted, int realized) {
    if (round < 0 || round >= horizon_) throw std::out_of_range("MistakeLedger: round outside horizon");
    if (player < 0 || player >= num_players_) throw std::out_of_range("MistakeLedger: player out of range");
    auto& cell = cells_[static_cast<std::size_t>(round) * num_players_ + player];
    if (cell != kUnset) {
      std::ostringstream msg;
      msg << "MistakeLedger: round " << round << ", player " << player << " already recorded";
      throw std::logic_error(msg.str());
    }
    cell = predicted != realized ? 1 : 0;
    mistakes_[static_cast<std::size_t>(player)] += cell;
  }

  bool flag(int round, int player) const {
    const auto cell = cells_.at(static_cast<std::size_t>(round) * num_players_ + player);
    if (cell == kUnset) throw std::logic_error("MistakeLedger: cell not recorded");
    return cell == 1;
  }

  bool recorded(int round, int player) const {
    return cells_.at(static_cast<std::size_t>(round) * num_players_ + player) != kUnset;
  }

  long long mistakes(int player) const { return mistakes_.at(static_cast<std::size_t>(player)); }
  const std::vector<long long>& per_player_mistakes() const { return mistakes_; }
  int horizon() const { return horizon_; }
  int num_players() const { return num_players_; }

 private:
  static constexpr signed char kUnset = -1;
  int horizon_;
  int num_players_;
  std::vector<signed char> cells_;
  std::vector<long long> mistakes_;
};

// How Nature picks Z_t.
struct CycleProcess {
  // Stay on each context for `block` consecutive rounds, then advance mod m.
  int block = 1;
};
struct MarkovProcess {
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> transition;
  int initial = 0;
};
struct ScriptProcess {
  std::vector<int> sequence;
};
using ContextProcess = std::variant<CycleProcess, MarkovProcess, ScriptProcess>;

inline void validate_process(const ContextProcess& process, int num_contexts, int horizon) {
  if (const auto* cycle = std::get_if<CycleProcess>(&process)) {
    if (cycle->block < 1) throw ConfigError("context_process.block: must be >= 1");
  } else if (const auto* markov = std::get_if<MarkovProcess>(&process)) {
    if (markov->transition.size() != static_cast<std::size_t>(num_contexts)) {
      throw ConfigError("context_process.transition: need one row per context");
    }
    for (std::size_t r = 0; r < markov->transition.size(); ++r) {
      const auto& row = markov->transition[r];
      const std::string where = "context_process.transition[" + std::to_string(r) + "]";
      if (row.size() != static_cast<std::size_t>(num_contexts)) throw ConfigError(where + ": wrong length");
      double total = 0.0;
      for (double v : row) {
        if (!(v >= 0.0)) throw ConfigError(where + ": negative probability");
        total += v;
      }
      if (std::abs(total - 1.0) > 1e-9) throw ConfigError(where + ": row does not sum to 1");
    }
    if (markov->initial < 0 || markov->initial >= num_contexts) {
      throw ConfigError("context_process.initial: out of range");
    }
  } else {
    const auto& script = std::get<ScriptProcess>(process);
    if (script.sequence.size() < static_cast<std::size_t>(horizon)) {
      throw ConfigError("context_process.sequence: shorter than horizon");
    }
    for (int z : script.sequence) {
      if (z < 0 || z >= num_contexts) throw ConfigError("context_process.sequence: context out of range");
    }
  }
}

// Realized contexts Z_0 .. Z_{T-1}. `run_seed` is mixed into the Markov seed.
inline std::vector<int> generate_contexts(const ContextProcess& process, int num_contexts, int horizon,
                                          std::uint64_t run_seed) {
  validate_process(process, num_contexts, horizon);
  std::vector<int> out(static_cast<std::size_t>(horizon));
  if (const auto* cycle = std::get_if<CycleProcess>(&process)) {
    for (int t = 0; t < horizon; ++t) out[static_cast<std::size_t>(t)] = (t / cycle->block) % num_contexts;
  } else if (const auto* markov = std::get_if<MarkovProcess>(&process)) {
    const std::uint64_t seed = rng::key(markov->seed, rng::kMarkov, run_seed);
    int state = markov->initial;
    for (int t = 0; t < horizon; ++t) {
      if (t > 0) {
        const double u = rng::to_unit(rng::key(seed, rng::kMarkov, static_cast<std::uint64_t>(t)));
        const auto& row = markov->transition[static_cast<std::size_t>(state)];
        double acc = 0.0;
        int next = num_contexts - 1;
        for (int z = 0; z < num_contexts; ++z) {
          acc += row[static_cast<std::size_t>(z)];
          if (u < acc) {
            next = z;
            break;
          }
        }
        // Skip zero-probability tail states picked up by rounding.
        while (row[static_cast<std::size_t>(next)] == 0.0 && next > 0) --next;
        state = next;
      }
      out[static_cast<std::size_t>(t)] = state;
    }
  } else {
    const auto& script = std::get<ScriptProcess>(process);
    out.assign(script.sequence.begin(), script.sequence.begin() + horizon);
  }
  return out;
}

}  // namespace isolearn

#endif  // ISOLEARN_PREDICTION_HPP
