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


// isolearn command line: run | sweep | validate (and a hidden oracle-check).
//
// Exit status: 0 success, 1 configuration error, 2 runtime or invariant
// failure, 3 I/O failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isolearn/isolearn.hpp"
#include "isolearn/oracle.hpp"
#include "isolearn/oracle_bridge.hpp"

namespace {

using namespace isolearn;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitIo = 3;

void print_run(const RunResult& r) {
  std::cout << r.run_id << ": eta=" << format_real(r.eta) << " eps=" << format_real(r.metrics.cce.epsilon)
            << " rhs=" << format_real(r.metrics.cce.bound_rhs) << "\n";
  for (std::size_t j = 0; j < r.metrics.players.size(); ++j) {
    const auto& p = r.metrics.players[j];
    std::cout << "  player " << j << ": L_T=" << p.mistakes << " ctx_regret=" << format_real(p.contextual_regret)
              << " bound=" << format_real(p.bound.total) << " bound_slack2=" << format_real(p.bound.total_slack2)
              << "\n";
  }
}

int cmd_validate(const std::string& config_path, const std::string& game_path) {
  if (!game_path.empty()) {
    const GameSpec g = load_game(game_path);
    std::cout << "ok: game players=" << g.num_players() << " actions=" << g.num_actions()
              << " dim=" << g.feature_dim() << " contexts=" << g.num_contexts() << "\n";
  }
  if (!config_path.empty()) {
    const RunConfig c = load_run_config(config_path);
    std::cout << "ok: config digest=" << digest_hex(c.canonical.dump()) << " players=" << c.game.num_players()
              << " actions=" << c.game.num_actions() << " contexts=" << c.game.num_contexts()
              << " horizon=" << c.horizon << "\n";
  }
  if (config_path.empty() && game_path.empty()) throw ConfigError("validate: pass --config or --game");
  return 0;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out) {
  const RunConfig config = load_run_config(config_path);
  const std::filesystem::path dir = out.empty() ? std::filesystem::path(config.output) : std::filesystem::path(out);
  const CellOutcome c = run_single(config, seed.value_or(config.seeds.front()), dir);
  if (c.pilot) print_run(*c.pilot);
  print_run(*c.main);
  if (!c.main->metrics.cce.within_bound) {
    std::cerr << "cce epsilon exceeds (1/T) sum of contextual regrets\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out, int threads) {
  const RunConfig config = load_run_config(config_path);
  const std::filesystem::path dir = out.empty() ? std::filesystem::path(config.output) : std::filesystem::path(out);
  const auto cells = run_sweep(config, dir, threads);
  int failed = 0;
  for (const auto& c : cells) {
    if (!c.error.empty()) {
      ++failed;
      std::cerr << run_id_for(config, c.cell) << ": " << c.error << "\n";
    }
  }
  std::cout << cells.size() - static_cast<std::size_t>(failed) << "/" << cells.size() << " cells written to "
            << (dir / "summary.csv").string() << "\n";
  return failed == 0 ? 0 : kExitRuntime;
}

// Spot-check primary computations against the brute-force oracles on a run
// truncated to the oracle's round limit.
int cmd_oracle_check(const std::string& config_path, std::optional<std::uint64_t> seed) {
  const RunConfig config = load_run_config(config_path);
  const oracle::SmallInstanceLimit limit;
  const int horizon = std::min<int>(config.horizon, static_cast<int>(limit.max_rounds));
  const Trace trace = simulate(config.game, config.context_process, config.predictors, horizon,
                               std::holds_alternative<double>(config.eta) ? std::get<double>(config.eta) : 1.0,
                               seed.value_or(config.seeds.front()));
  const auto dense = oracle::to_dense(config.game);
  const auto plain = oracle::to_plain(trace);
  bool ok = true;

  double worst_cost = 0.0;
  for (const auto& r : trace.rounds) {
    for (int j = 0; j < trace.num_players; ++j) {
      const double a = expected_cost(config.game, j, r.strategies, r.realized_context);
      const double b = oracle::brute_expected_cost(dense, j, oracle::to_plain(r.strategies), r.realized_context, limit);
      worst_cost = std::max(worst_cost, std::abs(a - b));
    }
  }
  ok = ok && worst_cost <= 1e-12;
  std::cout << "expected_cost vs brute force: max |diff| = " << format_real(worst_cost) << "\n";

  if (trace.num_actions <= 4) {
    for (int j = 0; j < trace.num_players; ++j) {
      for (int z = 0; z < trace.num_contexts; ++z) {
        const auto vertex = best_per_context_comparator(trace, j, z);
        const auto sums = summed_losses(trace, j, z);
        const double vertex_value = dot(vertex.probs(), sums);
        const auto [w, grid_value] = oracle::grid_comparator(plain, j, z, 0.01, limit);
        const bool agree = grid_value >= vertex_value - 1e-9;
        ok = ok && agree;
        std::cout << "comparator player " << j << " context " << z << ": vertex=" << format_real(vertex_value)
                  << " grid=" << format_real(grid_value) << (agree ? "" : "  MISMATCH") << "\n";
      }
    }
  }

  const double eps = cce_epsilon(trace).epsilon;
  const double gap = oracle::exhaustive_cce_gap(plain, limit);
  ok = ok && std::abs(eps - gap) <= 1e-12;
  std::cout << "cce epsilon=" << format_real(eps) << " exhaustive=" << format_real(gap) << "\n";
  std::cout << (ok ? "oracle-check: ok" : "oracle-check: DISAGREEMENT") << "\n";
  return ok ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prediction-routed optimistic Hedge in latent-context games"};
  app.require_subcommand(1);

  std::string config_path, game_path, out;
  std::optional<std::uint64_t> seed;
  int threads = 1;

  auto* run = app.add_subcommand("run", "Run one seed and write trace, summary and config echo");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run->add_option("--seed", seed, "Seed (default: first configured seed)");
  run->add_option("--out", out, "Output directory (default: config output)");

  auto* sweep = app.add_subcommand("sweep", "Run every (sweep value, seed) cell");
  sweep->add_option("--config", config_path, "Run configuration (JSON)")->required();
  sweep->add_option("--out", out, "Output directory (default: config output)");
  sweep->add_option("--threads", threads, "Worker threads over cells")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check a configuration or game file");
  validate->add_option("--config", config_path, "Run configuration (JSON)");
  validate->add_option("--game", game_path, "Game document (JSON)");

  auto* check = app.add_subcommand("oracle-check", "");
  check->group("");
  check->add_option("--config", config_path)->required();
  check->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; malformed invocations count as configuration errors.
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, seed, out);
    if (*sweep) return cmd_sweep(config_path, out, threads);
    if (*validate) return cmd_validate(config_path, game_path);
    if (*check) return cmd_oracle_check(config_path, seed);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
