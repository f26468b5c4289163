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

#ifndef ISOLEARN_GAME_IO_HPP
#define ISOLEARN_GAME_IO_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isolearn/error.hpp"
#include "isolearn/game.hpp"

namespace isolearn {

// Game document:
//   {
//     "players": J, "actions": K, "dim": d,
//     "contexts": [[z_0 ...], ...],            // m vectors of length d
//     "features": [[...], ...]                 // J flat arrays of K^J * d reals,
//   }                                          // joint-action major, lexicographic
//
// `path` is prefixed to every error message so callers can report where in a
// larger document the game lives.
inline GameSpec game_from_json(const nlohmann::json& doc, const std::string& path = "game") {
  auto field = [&](const char* name) -> const nlohmann::json& {
    if (!doc.is_object() || !doc.contains(name)) throw ConfigError(path + "." + name + ": missing");
    return doc.at(name);
  };
  auto positive_int = [&](const char* name) {
    const auto& v = field(name);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw ConfigError(path + "." + name + ": expected a positive integer");
    }
    return v.get<int>();
  };
  auto real_array = [&](const nlohmann::json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(where + "[" + std::to_string(i) + "]: expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  };

  const int players = positive_int("players");
  const int actions = positive_int("actions");
  const int dim = positive_int("dim");

  const auto& ctx = field("contexts");
  if (!ctx.is_array()) throw ConfigError(path + ".contexts: expected an array of vectors");
  std::vector<std::vector<double>> contexts;
  for (std::size_t z = 0; z < ctx.size(); ++z) {
    contexts.push_back(real_array(ctx[z], path + ".contexts[" + std::to_string(z) + "]"));
  }

  const auto& feat = field("features");
  if (!feat.is_array() || feat.size() != static_cast<std::size_t>(players)) {
    throw ConfigError(path + ".features: expected one flat array per player");
  }
  std::vector<double> features;
  for (std::size_t j = 0; j < feat.size(); ++j) {
    auto row = real_array(feat[j], path + ".features[" + std::to_string(j) + "]");
    features.insert(features.end(), row.begin(), row.end());
  }

  try {
    return GameSpec(players, actions, dim, std::move(features), std::move(contexts));
  } catch (const BoundViolation& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline nlohmann::json game_to_json(const GameSpec& spec) {
  nlohmann::json doc;
  doc["players"] = spec.num_players();
  doc["actions"] = spec.num_actions();
  doc["dim"] = spec.feature_dim();
  doc["contexts"] = spec.contexts();
  const std::size_t per_player = spec.num_joint_actions() * static_cast<std::size_t>(spec.feature_dim());
  nlohmann::json features = nlohmann::json::array();
  for (int j = 0; j < spec.num_players(); ++j) {
    const auto row = spec.features().subspan(static_cast<std::size_t>(j) * per_player, per_player);
    features.push_back(std::vector<double>(row.begin(), row.end()));
  }
  doc["features"] = std::move(features);
  return doc;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline GameSpec load_game(const std::filesystem::path& path) {
  return game_from_json(read_json_file(path), path.string());
}

}  // namespace isolearn

#endif  // ISOLEARN_GAME_IO_HPP
