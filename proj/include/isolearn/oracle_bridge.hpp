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

// Copies library types into the plain inputs taken by isolearn::oracle.

#ifndef ISOLEARN_ORACLE_BRIDGE_HPP
#define ISOLEARN_ORACLE_BRIDGE_HPP

#include <vector>

#include "isolearn/game.hpp"
#include "isolearn/metrics.hpp"
#include "isolearn/oracle.hpp"

namespace isolearn::oracle {

inline DenseGame to_dense(const GameSpec& spec) {
  return DenseGame{spec.num_players(), spec.num_actions(), spec.feature_dim(),
                   std::vector<double>(spec.features().begin(), spec.features().end()), spec.contexts()};
}

inline std::vector<std::vector<double>> to_plain(const JointProfile& profile) {
  std::vector<std::vector<double>> out;
  for (const auto& s : profile) out.emplace_back(s.probs().begin(), s.probs().end());
  return out;
}

inline std::vector<TraceRound> to_plain(const Trace& trace) {
  std::vector<TraceRound> out;
  out.reserve(trace.rounds.size());
  for (const auto& r : trace.rounds) {
    TraceRound round;
    round.context = r.realized_context;
    round.strategies = to_plain(r.strategies);
    for (const auto& l : r.losses) round.losses.emplace_back(l.values().begin(), l.values().end());
    out.push_back(std::move(round));
  }
  return out;
}

}  // namespace isolearn::oracle

#endif  // ISOLEARN_ORACLE_BRIDGE_HPP
