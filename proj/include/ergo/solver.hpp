#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergo/game.hpp"
#include "ergo/matrix_game.hpp"
#include "ergo/mdp_eval.hpp"
#include "ergo/parallel.hpp"

namespace ergo {

/// A state keeps its current distribution when its guaranteed matrix-game
/// payoff is within this of the optimum; looser stalls convergence, tighter
/// makes the improvement step oscillate on LP noise.
inline constexpr double kOptTolerance = 1e-8;

enum class Termination { converged, stalled, max_iters };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::stalled: return "stalled";
    case Termination::max_iters: return "max-iters";
  }
  return "unknown";
}

struct SolveOptions {
  double epsilon = 0.01;
  int target = 0;
  int max_iters = 500;
  std::uint64_t seed = 0;  // reserved for randomized restarts; the initial strategy is uniform
  bool skip_ergodic_check = false;
  int threads = 0;  // 0: ERGO_THREADS environment variable, else 1
};

/// Outcome of a solve: certified value bracket, the strategies achieving it,
/// and the per-iteration bound trace.
struct SolveReport {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon_requested = 0.0;
  StationaryStrategy strategy_p1, strategy_p2;
  int iterations_p1 = 0;
  int iterations_p2 = 0;
  std::vector<std::pair<double, double>> gain_trace;  // (lower, upper) per iteration
  double wall_time_s = 0.0;
  Termination termination = Termination::converged;
};

/// One improvement sweep: at every state builds the local matrix game from
/// rewards plus one-step potentials, solves and refines it, and replaces the
/// state's distribution unless the incumbent is already optimal within
/// kOptTolerance. Returns the new strategy and whether anything changed.
inline std::pair<StationaryStrategy, bool> improve_once(const ConcurrentGame& game,
                                                        const StationaryStrategy& strat,
                                                        const PotentialSolution& eval,
                                                        int threads = 1) {
  const int n = game.n_states();
  const bool p1 = strat.player == 1;
  StationaryStrategy next = strat;
  std::vector<char> changed(n, 0);
  const std::vector<double>& v = eval.potential;

  parallel_chunks(n, resolve_threads(threads), [&](int lo, int hi) {
    for (int s = lo; s < hi; ++s) {
      const int r = game.n_actions(1, s);
      const int c = game.n_actions(2, s);
      Matrix m(r, std::vector<double>(c));
      for (int a1 = 0; a1 < r; ++a1) {
        for (int a2 = 0; a2 < c; ++a2) {
          double entry = game.reward(s, a1, a2);
          for (const auto& e : game.successors(s, a1, a2)) entry += e.prob * v[e.state];
          m[a1][a2] = entry;
        }
      }
      MatrixGameSolution sol;
      try {
        sol = refine_solution(m, solve_matrix_game(m));
      } catch (const SolveError& err) {
        throw SolveError("state " + std::to_string(s) + ": " + err.what());
      }

      const auto& current = strat.probs[s];
      double guarantee;
      if (p1) {
        const auto pay = detail::row_payoffs(m, current);
        guarantee = *std::min_element(pay.begin(), pay.end());
        if (guarantee < sol.value - kOptTolerance) {
          next.probs[s] = sol.row_strategy;
          changed[s] = 1;
        }
      } else {
        const auto pay = detail::col_payoffs(m, current);
        guarantee = *std::max_element(pay.begin(), pay.end());
        if (guarantee > sol.value + kOptTolerance) {
          next.probs[s] = sol.col_strategy;
          changed[s] = 1;
        }
      }
    }
  });

  bool any = false;
  for (char c : changed) any = any || c != 0;
  return {std::move(next), any};
}

/// Exact guarantee of a strategy against a best-responding opponent: the
/// gain of its evaluation. Certifies epsilon-optimality of solver output.
inline double best_response_value(const ConcurrentGame& game, const StationaryStrategy& strat) {
  return evaluate_strategy(game, strat, 0).gain;
}

/// Strategy iteration with a dual-bound stopping rule. Alternates full
/// player-1 and player-2 iterations: evaluating player 1's strategy yields a
/// lower bound on the game value and evaluating player 2's an upper bound,
/// so the loop stops with a certificate once the bracket closes to epsilon.
/// Terminates as "stalled" when neither player can improve while the bracket
/// is still open, and as "max-iters" at the iteration cap; the reported
/// bounds stay valid in every case.
inline SolveReport solve(const ConcurrentGame& game, const SolveOptions& opts = {}) {
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!opts.skip_ergodic_check && !ergodic_sufficient(game)) {
    throw SolveError(
        "game failed the ergodicity sufficient condition; "
        "solve only certifies values for ergodic games (override to force)");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const int threads = resolve_threads(opts.threads);

  SolveReport report;
  report.epsilon_requested = opts.epsilon;

  StationaryStrategy s1 = uniform_strategy(game, 1);
  StationaryStrategy s2 = uniform_strategy(game, 2);

  auto finish = [&](Termination reason, const StationaryStrategy& p1,
                    const StationaryStrategy& p2) {
    report.termination = reason;
    report.strategy_p1 = p1;
    report.strategy_p2 = p2;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
  };

  for (int iter = 0;; ++iter) {
    const PotentialSolution e1 = evaluate_strategy(game, s1, opts.target);
    ++report.iterations_p1;
    const PotentialSolution e2 = evaluate_strategy(game, s2, opts.target);
    ++report.iterations_p2;
    report.lower = e1.gain;
    report.upper = e2.gain;
    report.gain_trace.emplace_back(e1.gain, e2.gain);

    if (report.upper - report.lower <= opts.epsilon) {
      return finish(Termination::converged, s1, s2);
    }
    if (iter == opts.max_iters - 1) {
      return finish(Termination::max_iters, s1, s2);
    }

    auto [n1, ch1] = improve_once(game, s1, e1, threads);
    auto [n2, ch2] = improve_once(game, s2, e2, threads);
    if (!ch1 && !ch2) {
      return finish(Termination::stalled, s1, s2);
    }
    s1 = std::move(n1);
    s2 = std::move(n2);
  }
}

}  // namespace ergo
