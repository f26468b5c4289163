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

// Run configuration document (JSON, schema_version 1):
//
//   {
//     "schema_version": 1,
//     "game": { "generator": "random-bilinear", "players": 2, "actions": 3,
//               "dim": 2, "contexts": 2, "seed": 7, "scale": 1.0 }
//           | { "generator": "zero-sum-2p", "actions": 3, "contexts": 1, "seed": 7 }
//           | { "generator": "cyclic-context-demo" }
//           | { "generator": "matching-pennies" }
//           | { "generator": "separable", "players": 2, "actions": 3, "contexts": 2, "seed": 7 }
//           | { "file": "relative/or/absolute/game.json" }
//           | { "inline": { <game document, see game_io.hpp> } },
//     "horizon": 2000,
//     "eta": 0.5 | "rule",
//     "context_process": { "kind": "cycle", "block": 1 }
//                      | { "kind": "markov", "seed": 3, "initial": 0,
//                          "transition": [[0.9, 0.1], [0.1, 0.9]] }
//                      | { "kind": "script", "sequence": [0, 1, ...] },
//     "predictors": <predictor> | [<predictor>, ...one per player],
//         <predictor> = { "kind": "oracle" | "majority" }
//                     | { "kind": "noisy", "p": 0.3, "seed": 0, "shared_stream": false }
//                     | { "kind": "scripted", "sequence": [...] },
//     "seeds": [1, 2, 3],
//     "sweep": { "axis": "p" | "eta", "values": [0.0, 0.1] },   // optional
//     "output": "out"
//   }
//
// A "p" sweep replaces every player's predictor with noisy(p), keeping any
// configured noise seed and shared_stream flag.

#ifndef ISOLEARN_CONFIG_HPP
#define ISOLEARN_CONFIG_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "isolearn/error.hpp"
#include "isolearn/game.hpp"
#include "isolearn/game_io.hpp"
#include "isolearn/generators.hpp"
#include "isolearn/prediction.hpp"

namespace isolearn {

inline constexpr int kSchemaVersion = 1;

// Two-pass step size: pilot at eta = 1, then eta_rule on the pilot's counts.
struct EtaRule {};
using EtaSetting = std::variant<double, EtaRule>;

enum class SweepAxis { kNoise, kEta };

struct Sweep {
  SweepAxis axis = SweepAxis::kNoise;
  std::vector<double> values;
};

struct RunConfig {
  GameSpec game;
  int horizon = 1;
  EtaSetting eta = 1.0;
  ContextProcess context_process;
  std::vector<PredictorConfig> predictors;  // one per player
  std::vector<std::uint64_t> seeds;
  std::optional<Sweep> sweep;
  std::string output;
  nlohmann::json canonical;  // the parsed document, keys sorted
};

// 64-bit FNV-1a, hex encoded.
inline std::string digest_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

class Reader {
 public:
  Reader(const nlohmann::json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + ": " + what); }
  [[noreturn]] void fail(const char* key, const std::string& what) const {
    throw ConfigError(path_ + "." + key + ": " + what);
  }

  bool has(const char* key) const { return doc_.contains(key); }
  const nlohmann::json& raw(const char* key) const {
    if (!has(key)) fail(key, "missing");
    return doc_.at(key);
  }
  std::string sub(const char* key) const { return path_ + "." + key; }

  long long integer(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long long>();
  }
  long long integer_or(const char* key, long long fallback) const { return has(key) ? integer(key) : fallback; }

  std::uint64_t seed_or(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    fail(key, "expected a non-negative integer");
  }

  double real(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  double real_or(const char* key, double fallback) const { return has(key) ? real(key) : fallback; }

  std::string text(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  bool flag_or(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::vector<int> int_list(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) fail(key, "entry " + std::to_string(i) + " is not an integer");
      out.push_back(v[i].get<int>());
    }
    return out;
  }

  std::vector<double> real_list(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key, "entry " + std::to_string(i) + " is not a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  int positive(const char* key) const {
    const long long v = integer(key);
    if (v < 1 || v > 1'000'000'000) fail(key, "must be a positive integer");
    return static_cast<int>(v);
  }

 private:
  const nlohmann::json& doc_;
  std::string path_;
};

inline GameSpec parse_game(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  Reader r(doc, "config.game");
  if (r.has("file")) {
    std::filesystem::path file = r.text("file");
    if (file.is_relative()) file = base_dir / file;
    return load_game(file);
  }
  if (r.has("inline")) return game_from_json(r.raw("inline"), "config.game.inline");
  const std::string gen = r.text("generator");
  if (gen == "random-bilinear") {
    return generators::random_bilinear(r.positive("players"), r.positive("actions"), r.positive("dim"),
                                       r.positive("contexts"), r.seed_or("seed", 0), r.real_or("scale", 1.0));
  }
  if (gen == "zero-sum-2p") {
    return generators::zero_sum_2p(r.positive("actions"), static_cast<int>(r.integer_or("contexts", 1)),
                                   r.seed_or("seed", 0));
  }
  if (gen == "cyclic-context-demo") return generators::cyclic_context_demo();
  if (gen == "matching-pennies") return generators::matching_pennies();
  if (gen == "separable") {
    return generators::separable(r.positive("players"), r.positive("actions"), r.positive("contexts"),
                                 r.seed_or("seed", 0));
  }
  r.fail("generator", "unknown generator '" + gen + "'");
}

inline PredictorConfig parse_predictor(const nlohmann::json& doc, const std::string& path) {
  Reader r(doc, path);
  const std::string kind = r.text("kind");
  PredictorConfig out;
  out.seed = r.seed_or("seed", 0);
  out.shared_stream = r.flag_or("shared_stream", false);
  if (kind == "oracle") {
    out.kind = OraclePredictor{};
  } else if (kind == "noisy") {
    out.kind = NoisyPredictor{r.real("p")};
  } else if (kind == "scripted") {
    out.kind = ScriptedPredictor{r.int_list("sequence")};
  } else if (kind == "majority") {
    out.kind = MajorityPredictor{};
  } else {
    r.fail("kind", "unknown predictor kind '" + kind + "'");
  }
  return out;
}

inline ContextProcess parse_process(const nlohmann::json& doc) {
  Reader r(doc, "config.context_process");
  const std::string kind = r.text("kind");
  if (kind == "cycle") return CycleProcess{static_cast<int>(r.integer_or("block", 1))};
  if (kind == "script") return ScriptProcess{r.int_list("sequence")};
  if (kind == "markov") {
    MarkovProcess m;
    m.seed = r.seed_or("seed", 0);
    m.initial = static_cast<int>(r.integer_or("initial", 0));
    const auto& rows = r.raw("transition");
    if (!rows.is_array()) r.fail("transition", "expected an array of rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_array()) r.fail("transition", "row " + std::to_string(i) + " is not an array");
      std::vector<double> row;
      for (const auto& v : rows[i]) {
        if (!v.is_number()) r.fail("transition", "row " + std::to_string(i) + " has a non-number");
        row.push_back(v.get<double>());
      }
      m.transition.push_back(std::move(row));
    }
    return m;
  }
  r.fail("kind", "unknown context process '" + kind + "'");
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".") {
  detail::Reader r(doc, "config");
  const long long version = r.integer("schema_version");
  if (version != kSchemaVersion) {
    r.fail("schema_version", "unsupported version " + std::to_string(version));
  }

  GameSpec game = detail::parse_game(r.raw("game"), base_dir);
  const int m = game.num_contexts();
  const int J = game.num_players();

  const int horizon = r.positive("horizon");

  EtaSetting eta = 1.0;
  if (r.has("eta")) {
    const auto& v = r.raw("eta");
    if (v.is_string() && v.get<std::string>() == "rule") {
      eta = EtaRule{};
    } else if (v.is_number()) {
      const double e = v.get<double>();
      if (!(e > 0.0 && e <= 1.0)) r.fail("eta", "must lie in (0, 1]");
      eta = e;
    } else {
      r.fail("eta", "expected a number in (0, 1] or \"rule\"");
    }
  }

  ContextProcess process = CycleProcess{};
  if (r.has("context_process")) process = detail::parse_process(r.raw("context_process"));
  try {
    validate_process(process, m, horizon);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config.") + e.what());
  }

  std::vector<PredictorConfig> predictors;
  if (!r.has("predictors")) {
    predictors.assign(static_cast<std::size_t>(J), PredictorConfig{OraclePredictor{}});
  } else if (r.raw("predictors").is_array()) {
    const auto& list = r.raw("predictors");
    if (list.size() != static_cast<std::size_t>(J)) {
      r.fail("predictors", "expected " + std::to_string(J) + " entries, one per player");
    }
    for (std::size_t j = 0; j < list.size(); ++j) {
      predictors.push_back(detail::parse_predictor(list[j], "config.predictors[" + std::to_string(j) + "]"));
    }
  } else {
    predictors.assign(static_cast<std::size_t>(J), detail::parse_predictor(r.raw("predictors"), "config.predictors"));
  }
  for (std::size_t j = 0; j < predictors.size(); ++j) {
    try {
      validate_predictor(predictors[j], m, horizon);
    } catch (const ConfigError& e) {
      throw ConfigError("config.predictors[" + std::to_string(j) + "]: " + e.what());
    }
  }

  std::vector<std::uint64_t> seeds{0};
  if (r.has("seeds")) {
    const auto& list = r.raw("seeds");
    if (!list.is_array() || list.empty()) r.fail("seeds", "expected a non-empty array of integers");
    seeds.clear();
    for (const auto& s : list) {
      if (!s.is_number_integer() || s.get<long long>() < 0) r.fail("seeds", "seeds must be non-negative integers");
      seeds.push_back(s.get<std::uint64_t>());
    }
  }

  std::optional<Sweep> sweep;
  if (r.has("sweep")) {
    detail::Reader s(r.raw("sweep"), "config.sweep");
    Sweep out;
    const std::string axis = s.text("axis");
    if (axis == "p") {
      out.axis = SweepAxis::kNoise;
    } else if (axis == "eta") {
      out.axis = SweepAxis::kEta;
    } else {
      s.fail("axis", "expected \"p\" or \"eta\"");
    }
    out.values = s.real_list("values");
    if (out.values.empty()) s.fail("values", "sweep axis must not be empty");
    for (double v : out.values) {
      if (out.axis == SweepAxis::kNoise && !(v >= 0.0 && v <= 1.0)) s.fail("values", "p must lie in [0, 1]");
      if (out.axis == SweepAxis::kNoise && v > 0.0 && m < 2) s.fail("values", "p > 0 needs at least two contexts");
      if (out.axis == SweepAxis::kEta && !(v > 0.0 && v <= 1.0)) s.fail("values", "eta must lie in (0, 1]");
    }
    sweep = std::move(out);
  }

  std::string output = r.has("output") ? r.text("output") : std::string("out");

  return RunConfig{std::move(game), horizon, eta, std::move(process), std::move(predictors), std::move(seeds),
                   std::move(sweep), std::move(output), doc};
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace isolearn

#endif  // ISOLEARN_CONFIG_HPP
