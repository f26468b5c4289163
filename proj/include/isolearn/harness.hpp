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

#ifndef ISOLEARN_HARNESS_HPP
#define ISOLEARN_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "isolearn/config.hpp"
#include "isolearn/error.hpp"
#include "isolearn/game.hpp"
#include "isolearn/learning.hpp"
#include "isolearn/metrics.hpp"
#include "isolearn/prediction.hpp"

namespace isolearn {

// Trace consistency tolerance: stored losses vs. recomputation from stored play.
inline constexpr double kTraceTolerance = 1e-12;

// Plays `horizon` rounds of the protocol: Nature draws Z_t, each player
// predicts, plays from the predicted-context learner, and updates the
// realized-context learner. `seed` is mixed into every random stream.
inline Trace simulate(const GameSpec& game, const ContextProcess& process,
                      const std::vector<PredictorConfig>& predictors, int horizon, double eta, std::uint64_t seed,
                      MistakeLedger* ledger_out = nullptr) {
  const int J = game.num_players();
  const int m = game.num_contexts();
  if (predictors.size() != static_cast<std::size_t>(J)) throw ConfigError("simulate: need one predictor per player");

  std::vector<PredictorConfig> seeded = predictors;
  for (auto& p : seeded) {
    p.seed = rng::key(p.seed, rng::kNoiseCoin, seed);
    validate_predictor(p, m, horizon);
  }
  const std::vector<int> contexts = generate_contexts(process, m, horizon, seed);

  LearnerBank bank(J, m, game.num_actions(), eta);
  MistakeLedger ledger(horizon, J);
  Trace trace{J, game.num_actions(), m, horizon, {}};
  trace.rounds.reserve(static_cast<std::size_t>(horizon));

  std::vector<int> guesses(static_cast<std::size_t>(J));
  for (int t = 0; t < horizon; ++t) {
    const int z = contexts[static_cast<std::size_t>(t)];
    const std::span<const int> history(contexts.data(), static_cast<std::size_t>(t));
    for (int j = 0; j < J; ++j) {
      guesses[static_cast<std::size_t>(j)] = predict(seeded[static_cast<std::size_t>(j)], j, t, z, history, m);
      ledger.record(t, j, guesses[static_cast<std::size_t>(j)], z);
    }
    RoundPlay play = iso_grpo_round(bank, guesses, z, game);
    trace.rounds.push_back(RoundRecord{t, z, guesses, std::move(play.profile), std::move(play.losses)});
  }

  for (int j = 0; j < J; ++j) {
    if (ledger.mistakes(j) != mistake_count(trace, j)) {
      throw InvariantError("simulate: mistake ledger disagrees with trace recount");
    }
  }
  if (ledger_out != nullptr) *ledger_out = std::move(ledger);
  return trace;
}

// Recomputes every stored loss vector from the stored strategies and realized
// context; throws InvariantError on a mismatch above kTraceTolerance.
inline void verify_trace(const GameSpec& game, const Trace& trace) {
  for (const auto& r : trace.rounds) {
    for (int j = 0; j < trace.num_players; ++j) {
      const LossVector again = loss_vector(game, j, opponents_of(r.strategies, j), r.realized_context);
      const auto& stored = r.losses[static_cast<std::size_t>(j)];
      for (int k = 0; k < again.size(); ++k) {
        if (std::abs(again[static_cast<std::size_t>(k)] - stored[static_cast<std::size_t>(k)]) > kTraceTolerance) {
          std::ostringstream msg;
          msg << "trace: round " << r.round << ", player " << j << " loss does not match recomputation";
          throw InvariantError(msg.str());
        }
      }
    }
  }
}

// One (sweep value, seed) cell of an experiment.
struct Cell {
  std::optional<double> sweep_value;
  std::uint64_t seed = 0;
};

struct RunResult {
  std::string run_id;
  std::uint64_t seed = 0;
  double eta = 1.0;
  double noise = 0.0;  // reported p
  Trace trace;
  RunMetrics metrics;
};

struct CellOutcome {
  Cell cell;
  std::optional<RunResult> pilot;  // present in "rule" eta mode
  std::optional<RunResult> main;
  std::string error;  // non-empty when the cell failed
};

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string run_id_for(const RunConfig& config, const Cell& cell) {
  std::string id;
  if (cell.sweep_value && config.sweep) {
    id = config.sweep->axis == SweepAxis::kNoise ? "p-" : "eta-";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", *cell.sweep_value);
    id += buf;
    id += "_";
  }
  return id + "seed-" + std::to_string(cell.seed);
}

// Computes a cell without touching the filesystem.
inline CellOutcome execute_cell(const RunConfig& config, const Cell& cell) {
  CellOutcome out{cell, std::nullopt, std::nullopt, {}};

  std::vector<PredictorConfig> predictors = config.predictors;
  EtaSetting eta = config.eta;
  if (cell.sweep_value && config.sweep) {
    if (config.sweep->axis == SweepAxis::kNoise) {
      for (auto& p : predictors) p.kind = NoisyPredictor{*cell.sweep_value};
    } else {
      eta = *cell.sweep_value;
    }
  }
  double noise = 0.0;
  if (const auto* noisy = std::get_if<NoisyPredictor>(&predictors.front().kind)) noise = noisy->p;

  const std::string id = run_id_for(config, cell);
  auto run = [&](double step, std::string run_id) {
    RunResult r;
    r.run_id = std::move(run_id);
    r.seed = cell.seed;
    r.eta = step;
    r.noise = noise;
    r.trace = simulate(config.game, config.context_process, predictors, config.horizon, step, cell.seed);
    verify_trace(config.game, r.trace);
    r.metrics = compute_run_metrics(r.trace, step);
    return r;
  };

  if (std::holds_alternative<EtaRule>(eta)) {
    out.pilot = run(1.0, id + "_pilot");
    double step = 1.0;
    const int m = config.game.num_contexts();
    const int K = config.game.num_actions();
    for (const auto& pm : out.pilot->metrics.players) {
      double var = 0.0;
      for (double v : pm.variation) var += v;
      step = std::min(step, eta_rule(m, K, static_cast<double>(pm.mistakes), var));
    }
    out.main = run(step, id);
  } else {
    out.main = run(std::get<double>(eta), id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV output

// Columns: t (1-based), Z_t, then per player j:
//   pred_j, mistake_j, w_j_0..w_j_{K-1}, l_j_0..l_j_{K-1}, inst_regret_j
inline std::string trace_csv(const RunResult& result) {
  const Trace& trace = result.trace;
  const int J = trace.num_players;
  const int K = trace.num_actions;
  std::vector<std::vector<double>> inst;
  for (int j = 0; j < J; ++j) inst.push_back(instantaneous_regret(trace, j));

  std::ostringstream out;
  out << "t,Z_t";
  for (int j = 0; j < J; ++j) {
    out << ",pred_" << j << ",mistake_" << j;
    for (int k = 0; k < K; ++k) out << ",w_" << j << "_" << k;
    for (int k = 0; k < K; ++k) out << ",l_" << j << "_" << k;
    out << ",inst_regret_" << j;
  }
  out << "\n";
  for (const auto& r : trace.rounds) {
    out << r.round + 1 << "," << r.realized_context;
    for (int j = 0; j < J; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      out << "," << r.predictions[ju] << "," << (r.predictions[ju] != r.realized_context ? 1 : 0);
      for (int k = 0; k < K; ++k) out << "," << format_real(r.strategies[ju][static_cast<std::size_t>(k)]);
      for (int k = 0; k < K; ++k) out << "," << format_real(r.losses[ju][static_cast<std::size_t>(k)]);
      out << "," << format_real(inst[ju][static_cast<std::size_t>(r.round)]);
    }
    out << "\n";
  }
  return out.str();
}

// Summary columns, in order:
//   run_id, seed, J, K, m, T, eta, p,
//   L_T_0..L_T_{J-1}, ctx_regret_0.., ext_regret_0..,
//   var_z_0..var_z_{m-1}   (within-context variation summed over players),
//   term_A_0.., term_B_0.., term_C_0..,
//   bound_exact_ok, bound_slack2_ok   (1 when every player satisfies it),
//   cce_epsilon, bound_rhs
inline std::string summary_header(int J, int m) {
  std::ostringstream out;
  out << "run_id,seed,J,K,m,T,eta,p";
  for (const char* name : {"L_T_", "ctx_regret_", "ext_regret_"}) {
    for (int j = 0; j < J; ++j) out << "," << name << j;
  }
  for (int z = 0; z < m; ++z) out << ",var_z_" << z;
  for (const char* name : {"term_A_", "term_B_", "term_C_"}) {
    for (int j = 0; j < J; ++j) out << "," << name << j;
  }
  out << ",bound_exact_ok,bound_slack2_ok,cce_epsilon,bound_rhs";
  return out.str();
}

inline std::string summary_row(const RunResult& r) {
  const auto& t = r.trace;
  const auto& players = r.metrics.players;
  std::ostringstream out;
  out << r.run_id << "," << r.seed << "," << t.num_players << "," << t.num_actions << "," << t.num_contexts << ","
      << t.horizon << "," << format_real(r.eta) << "," << format_real(r.noise);
  for (const auto& p : players) out << "," << p.mistakes;
  for (const auto& p : players) out << "," << format_real(p.contextual_regret);
  for (const auto& p : players) out << "," << format_real(p.external_regret);
  for (int z = 0; z < t.num_contexts; ++z) {
    double v = 0.0;
    for (const auto& p : players) v += p.variation[static_cast<std::size_t>(z)];
    out << "," << format_real(v);
  }
  for (const auto& p : players) out << "," << format_real(p.bound.term_a);
  for (const auto& p : players) out << "," << format_real(p.bound.term_b);
  for (const auto& p : players) out << "," << format_real(p.bound.term_c);
  const bool exact = std::all_of(players.begin(), players.end(), [](const auto& p) { return p.exact_bound_ok; });
  const bool slack = std::all_of(players.begin(), players.end(), [](const auto& p) { return p.slack2_bound_ok; });
  out << "," << (exact ? 1 : 0) << "," << (slack ? 1 : 0) << "," << format_real(r.metrics.cce.epsilon) << ","
      << format_real(r.metrics.cce.bound_rhs);
  return out.str();
}

// Per sweep value: mean and standard error over seeds of the player-averaged
// contextual regret, mistake rate L_T / T, and cce epsilon.
inline std::string aggregate_block(const RunConfig& config, const std::vector<CellOutcome>& cells) {
  struct Acc {
    std::vector<double> regret, rate, eps;
  };
  std::vector<std::optional<double>> keys;
  std::vector<Acc> accs;
  for (const auto& c : cells) {
    if (!c.main) continue;
    std::size_t slot = 0;
    while (slot < keys.size() && keys[slot] != c.cell.sweep_value) ++slot;
    if (slot == keys.size()) {
      keys.push_back(c.cell.sweep_value);
      accs.emplace_back();
    }
    const auto& players = c.main->metrics.players;
    double regret = 0.0, rate = 0.0;
    for (const auto& p : players) {
      regret += p.contextual_regret;
      rate += static_cast<double>(p.mistakes) / c.main->trace.horizon;
    }
    accs[slot].regret.push_back(regret / static_cast<double>(players.size()));
    accs[slot].rate.push_back(rate / static_cast<double>(players.size()));
    accs[slot].eps.push_back(c.main->metrics.cce.epsilon);
  }
  auto mean_se = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return std::pair{mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()))};
  };

  std::ostringstream out;
  out << "sweep_axis,sweep_value,cells,mean_ctx_regret,stderr_ctx_regret,mean_mistake_rate,stderr_mistake_rate,"
         "mean_cce_epsilon,stderr_cce_epsilon\n";
  const char* axis = !config.sweep ? "none" : (config.sweep->axis == SweepAxis::kNoise ? "p" : "eta");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto [rm, rs] = mean_se(accs[i].regret);
    const auto [lm, ls] = mean_se(accs[i].rate);
    const auto [em, es] = mean_se(accs[i].eps);
    out << axis << "," << (keys[i] ? format_real(*keys[i]) : std::string("")) << "," << accs[i].regret.size() << ","
        << format_real(rm) << "," << format_real(rs) << "," << format_real(lm) << "," << format_real(ls) << ","
        << format_real(em) << "," << format_real(es) << "\n";
  }
  return out.str();
}

inline std::string summary_csv(const RunConfig& config, const std::vector<CellOutcome>& cells, bool with_aggregate) {
  std::ostringstream out;
  out << summary_header(config.game.num_players(), config.game.num_contexts()) << "\n";
  for (const auto& c : cells) {
    if (c.pilot) out << summary_row(*c.pilot) << "\n";
    if (c.main) out << summary_row(*c.main) << "\n";
  }
  if (with_aggregate) out << "\n" << aggregate_block(config, cells);
  bool failed = false;
  for (const auto& c : cells) failed = failed || !c.error.empty();
  if (failed) {
    out << "\nfailed_run_id,error\n";
    for (const auto& c : cells) {
      if (!c.error.empty()) out << run_id_for(config, c.cell) << ",\"" << c.error << "\"\n";
    }
  }
  return out.str();
}

inline std::string config_echo(const RunConfig& config) {
  const std::string canonical = config.canonical.dump();
  nlohmann::json echo;
  echo["config"] = config.canonical;
  echo["digest"] = digest_hex(canonical);
  return echo.dump(2) + "\n";
}

// Writes through a temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

inline void write_traces(const std::filesystem::path& dir, const CellOutcome& c) {
  if (c.pilot) write_atomic(dir / ("trace_" + c.pilot->run_id + ".csv"), trace_csv(*c.pilot));
  if (c.main) write_atomic(dir / ("trace_" + c.main->run_id + ".csv"), trace_csv(*c.main));
}

// Runs one seed (ignoring any sweep) and writes trace, summary and config echo
// into `out_dir`. Returns the computed cell.
inline CellOutcome run_single(const RunConfig& config, std::uint64_t seed, const std::filesystem::path& out_dir) {
  CellOutcome c = execute_cell(config, Cell{std::nullopt, seed});
  ensure_directory(out_dir);
  write_traces(out_dir, c);
  write_atomic(out_dir / "summary.csv", summary_csv(config, {c}, false));
  write_atomic(out_dir / "config_echo.json", config_echo(config));
  return c;
}

// All (sweep value x seed) cells, ordered by sweep value then seed. Cells run
// on up to `threads` workers; every cell writes only its own trace file and
// the summary is written once at the end. A failed cell is recorded and does
// not stop the others.
inline std::vector<CellOutcome> run_sweep(const RunConfig& config, const std::filesystem::path& out_dir,
                                          int threads = 1) {
  std::vector<Cell> cells;
  if (config.sweep) {
    for (double v : config.sweep->values) {
      for (auto s : config.seeds) cells.push_back(Cell{v, s});
    }
  } else {
    for (auto s : config.seeds) cells.push_back(Cell{std::nullopt, s});
  }
  ensure_directory(out_dir);

  std::vector<CellOutcome> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        results[i] = execute_cell(config, cells[i]);
        write_traces(out_dir, results[i]);
      } catch (const std::exception& e) {
        results[i] = CellOutcome{cells[i], std::nullopt, std::nullopt, e.what()};
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
  }

  write_atomic(out_dir / "summary.csv", summary_csv(config, results, true));
  write_atomic(out_dir / "config_echo.json", config_echo(config));
  return results;
}

}  // namespace isolearn

#endif  // ISOLEARN_HARNESS_HPP
