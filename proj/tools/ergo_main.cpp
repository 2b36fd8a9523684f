// ergo: command-line front end for the ergodic mean-payoff game solver.
//
// Subcommands: generate, solve, simulate, experiment, validate.
// Exit codes: 0 success/converged, 2 stalled, 3 iteration cap,
//             64 usage error, 65 data/format error.
//
// Timings are printed to stderr so reports on stdout are byte-reproducible.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ergo/game.hpp"
#include "ergo/io.hpp"
#include "ergo/models.hpp"
#include "ergo/simulate.hpp"
#include "ergo/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStalled = 2;
constexpr int kExitMaxIters = 3;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

ergo::ConcurrentGame make_model(const std::string& model, int n, double noise, bool symmetric,
                                double pstep) {
  if (model == "bw") return ergo::gen_block_withholding({n});
  if (model == "ds") {
    ergo::DoubleSpendParams params;
    params.n = n;
    return ergo::gen_double_spend(params);
  }
  if (model == "pos") {
    ergo::ProofOfStakeParams params;
    params.n = n;
    params.p_step = pstep;
    return ergo::gen_proof_of_stake(params);
  }
  if (model == "rps") return ergo::gen_rps(noise, symmetric);
  throw std::invalid_argument("unknown model: " + model);
}

void print_strategy(std::ostream& os, const ergo::ConcurrentGame& game,
                    const ergo::StationaryStrategy& strat) {
  for (int s = 0; s < game.n_states(); ++s) {
    os << "  state " << s << ":";
    const auto& labels = game.action_labels(strat.player, s);
    for (int a = 0; a < static_cast<int>(strat.probs[s].size()); ++a) {
      if (strat.probs[s][a] == 0.0) continue;
      os << " " << labels[a] << ":" << fmt(strat.probs[s][a]);
    }
    os << "\n";
  }
}

struct ExperimentRow {
  std::size_t transitions = 0;
  int states = 0;
  int iterations = 0;
  double time_s = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::string error;
};

int cmd_generate(const std::string& model, int n, double noise, bool symmetric, double pstep,
                 const std::string& out_path) {
  const auto game = make_model(model, n, noise, symmetric, pstep);
  ergo::save_game(out_path, game);
  std::cout << "states " << game.n_states() << "\n";
  std::cout << "transitions " << game.transition_size() << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& game_path) {
  const auto game = ergo::load_game(game_path);
  const auto violations = ergo::validate(game);
  if (violations.empty()) {
    std::cout << "valid: " << game.n_states() << " states, " << game.transition_size()
              << " transitions\n";
    return kExitOk;
  }
  for (const auto& v : violations) std::cout << v.to_string() << "\n";
  std::cout << violations.size() << " violation(s)\n";
  return kExitData;
}

int cmd_solve(const std::string& game_path, double epsilon, int target, int max_iters,
              std::uint64_t seed, bool force, int threads, bool as_json,
              const std::string& strategy1_out, const std::string& strategy2_out) {
  const auto game = ergo::load_game(game_path);
  {
    const auto violations = ergo::validate(game);
    if (!violations.empty()) {
      std::cerr << "error: invalid game: " << violations.front().to_string() << "\n";
      return kExitData;
    }
  }
  ergo::SolveOptions opts;
  opts.epsilon = epsilon;
  opts.target = target;
  opts.max_iters = max_iters;
  opts.seed = seed;
  opts.skip_ergodic_check = force;
  opts.threads = threads;
  const auto report = ergo::solve(game, opts);

  if (as_json) {
    std::cout << ergo::report_to_json(report, game).dump(1) << "\n";
  } else {
    std::cout << "value in [" << fmt(report.lower) << ", " << fmt(report.upper) << "]\n";
    std::cout << "epsilon requested " << fmt(report.epsilon_requested) << ", achieved "
              << fmt(report.upper - report.lower) << "\n";
    std::cout << "termination: " << ergo::to_string(report.termination) << "\n";
    std::cout << "iterations: player1 " << report.iterations_p1 << ", player2 "
              << report.iterations_p2 << "\n";
    std::cout << "strategy player1:\n";
    print_strategy(std::cout, game, report.strategy_p1);
    std::cout << "strategy player2:\n";
    print_strategy(std::cout, game, report.strategy_p2);
  }
  std::cerr << "time: " << fmt(report.wall_time_s) << " s\n";

  if (!strategy1_out.empty())
    ergo::save_json_file(strategy1_out, ergo::strategy_to_json(report.strategy_p1, game));
  if (!strategy2_out.empty())
    ergo::save_json_file(strategy2_out, ergo::strategy_to_json(report.strategy_p2, game));

  switch (report.termination) {
    case ergo::Termination::converged: return kExitOk;
    case ergo::Termination::stalled: return kExitStalled;
    case ergo::Termination::max_iters: return kExitMaxIters;
  }
  return kExitOk;
}

int cmd_simulate(const std::string& game_path, const std::string& s1_path,
                 const std::string& s2_path, int start, long long steps, int batches,
                 std::uint64_t seed, int threads, bool as_json) {
  const auto game = ergo::load_game(game_path);
  auto s1 = ergo::strategy_from_json(ergo::load_json_file(s1_path), game);
  auto s2 = ergo::strategy_from_json(ergo::load_json_file(s2_path), game);
  if (s1.player == 2 && s2.player == 1) std::swap(s1, s2);
  const auto result = ergo::simulate_profile(game, s1, s2, start, steps, batches, seed, threads);
  if (as_json) {
    std::cout << ergo::simulation_to_json(result).dump(1) << "\n";
  } else {
    std::cout << "mean payoff " << fmt(result.mean_payoff_estimate) << " +/- "
              << fmt(result.half_width_95) << " (95%, " << result.batches << " batches of "
              << result.steps << " steps, " << result.rng << " seed " << result.seed << ")\n";
  }
  return kExitOk;
}

int cmd_experiment(const std::string& model, std::vector<int> sizes, double epsilon, double pstep,
                   const std::string& csv_path, bool parallel, int threads) {
  std::sort(sizes.begin(), sizes.end());

  auto run_row = [&](int size) {
    ExperimentRow row;
    try {
      // For ds the size is the total state count; the generator's n counts
      // the non-shuffling states.
      const int n = model == "ds" ? size - 1 : size;
      const auto game = make_model(model, n, 0.1, true, pstep);
      row.states = game.n_states();
      row.transitions = game.transition_size();
      ergo::SolveOptions opts;
      opts.epsilon = epsilon;
      opts.threads = threads;
      const auto report = ergo::solve(game, opts);
      row.iterations = report.iterations_p1;
      row.time_s = report.wall_time_s;
      row.lower = report.lower;
      row.upper = report.upper;
      if (report.termination != ergo::Termination::converged) {
        row.error = ergo::to_string(report.termination);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  };

  std::vector<ExperimentRow> rows;
  if (parallel) {
    std::vector<std::future<ExperimentRow>> futures;
    futures.reserve(sizes.size());
    for (int size : sizes) {
      futures.push_back(std::async(std::launch::async, run_row, size));
    }
    for (auto& f : futures) rows.push_back(f.get());
  } else {
    for (int size : sizes) rows.push_back(run_row(size));
  }

  std::printf("%-12s %-8s %-6s %-10s %-14s %-14s\n", "transitions", "states", "iters", "time_s",
              "lower", "upper");
  for (const auto& row : rows) {
    if (row.error.empty()) {
      std::printf("%-12zu %-8d %-6d %-10.2f %-14.6f %-14.6f\n", row.transitions, row.states,
                  row.iterations, row.time_s, row.lower, row.upper);
    } else {
      std::printf("%-12zu %-8d error: %s\n", row.transitions, row.states, row.error.c_str());
    }
  }

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    csv << "transitions,states,iterations,time_s,lower,upper,error\n";
    for (const auto& row : rows) {
      csv << row.transitions << "," << row.states << "," << row.iterations << ","
          << fmt(row.time_s) << "," << fmt(row.lower) << "," << fmt(row.upper) << ","
          << row.error << "\n";
    }
  }
  const bool all_ok =
      std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.error.empty(); });
  return all_ok ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solver and experiment harness for ergodic concurrent mean-payoff games"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a game model and write its JSON file");
  std::string gen_model, gen_out;
  int gen_n = 10;
  double gen_noise = 0.1, gen_pstep = 0.01;
  bool gen_symmetric = false;
  gen->add_option("model", gen_model, "bw | ds | pos | rps")->required();
  gen->add_option("--n", gen_n, "discretization size (bw/ds/pos)");
  gen->add_option("--noise", gen_noise, "network noise for rps");
  gen->add_flag("--symmetric", gen_symmetric, "rps: antisymmetric lap rewards");
  gen->add_option("--pstep", gen_pstep, "pos: connectivity grid step");
  gen->add_option("--out", gen_out, "output path")->required();

  // validate
  auto* val = app.add_subcommand("validate", "check a game file against the format invariants");
  std::string val_path;
  val->add_option("game", val_path, "game JSON file")->required();

  // solve
  auto* slv = app.add_subcommand("solve", "solve a game to an epsilon-certified value bracket");
  std::string slv_path, slv_s1_out, slv_s2_out;
  double slv_epsilon = 0.01;
  int slv_target = 0, slv_max_iters = 500, slv_threads = 0;
  std::uint64_t slv_seed = 0;
  bool slv_force = false, slv_json = false;
  slv->add_option("game", slv_path, "game JSON file")->required();
  slv->add_option("--epsilon", slv_epsilon, "target bracket width (default 0.01)");
  slv->add_option("--target", slv_target, "potential anchor state (default 0)");
  slv->add_option("--max-iters", slv_max_iters, "iteration cap");
  slv->add_option("--seed", slv_seed, "reserved for randomized restarts");
  slv->add_option("--threads", slv_threads, "per-state solver workers (0: ERGO_THREADS env)");
  slv->add_flag("--force", slv_force, "solve even if the ergodicity check is inconclusive");
  slv->add_flag("--json", slv_json, "emit the report as JSON");
  slv->add_option("--strategy-p1", slv_s1_out, "write player 1's strategy to this file");
  slv->add_option("--strategy-p2", slv_s2_out, "write player 2's strategy to this file");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo mean payoff of a strategy profile");
  std::string sim_game, sim_s1, sim_s2;
  int sim_start = 0, sim_batches = 32, sim_threads = 0;
  long long sim_steps = 100000;
  std::uint64_t sim_seed = 1;
  bool sim_json = false;
  sim->add_option("game", sim_game, "game JSON file")->required();
  sim->add_option("strategy1", sim_s1, "player strategy JSON file")->required();
  sim->add_option("strategy2", sim_s2, "other player's strategy JSON file")->required();
  sim->add_option("--start", sim_start, "start state (default 0)");
  sim->add_option("--steps", sim_steps, "steps per batch");
  sim->add_option("--batches", sim_batches, "independent batches");
  sim->add_option("--seed", sim_seed, "base RNG seed");
  sim->add_option("--threads", sim_threads, "batch workers (0: ERGO_THREADS env)");
  sim->add_flag("--json", sim_json, "emit the result as JSON");

  // experiment
  auto* exp = app.add_subcommand("experiment", "generate+solve a size sweep and tabulate it");
  std::string exp_model, exp_csv;
  std::vector<int> exp_sizes;
  double exp_epsilon = 0.01, exp_pstep = 0.1;
  bool exp_parallel = false;
  int exp_threads = 0;
  exp->add_option("model", exp_model, "bw | ds | pos | rps")->required();
  exp->add_option("--sizes", exp_sizes, "model sizes (ds: total state counts)")
      ->required()
      ->expected(-1);
  exp->add_option("--epsilon", exp_epsilon, "bracket width per row");
  exp->add_option("--pstep", exp_pstep, "pos: connectivity grid step (default 0.1)");
  exp->add_option("--csv", exp_csv, "also write the table as CSV");
  exp->add_flag("--parallel", exp_parallel, "run rows concurrently");
  exp->add_option("--threads", exp_threads, "per-state solver workers per row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_generate(gen_model, gen_n, gen_noise, gen_symmetric, gen_pstep, gen_out);
    if (val->parsed()) return cmd_validate(val_path);
    if (slv->parsed())
      return cmd_solve(slv_path, slv_epsilon, slv_target, slv_max_iters, slv_seed, slv_force,
                       slv_threads, slv_json, slv_s1_out, slv_s2_out);
    if (sim->parsed())
      return cmd_simulate(sim_game, sim_s1, sim_s2, sim_start, sim_steps, sim_batches, sim_seed,
                          sim_threads, sim_json);
    if (exp->parsed())
      return cmd_experiment(exp_model, exp_sizes, exp_epsilon, exp_pstep, exp_csv, exp_parallel,
                            exp_threads);
  } catch (const ergo::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ergo::SolveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
