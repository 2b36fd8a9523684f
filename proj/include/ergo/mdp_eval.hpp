#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergo/game.hpp"
#include "ergo/linalg.hpp"

namespace ergo {

/// Opponent actions are switched only when they beat the incumbent by more
/// than this; keeps the best-response iteration from oscillating on ties.
inline constexpr double kImprovementTolerance = 1e-10;
/// Constraints whose Bellman slack is below this count as tight.
inline constexpr double kEvalSlackTolerance = 1e-9;

/// Result of evaluating a fixed stationary strategy: the gain (the
/// opponent's best-response mean payoff against it), the potential vector
/// anchored at the target state, and the extracted pure best response.
struct PotentialSolution {
  double gain = 0.0;
  std::vector<double> potential;
  int target_state = 0;
  StationaryStrategy best_response;
};

/// Expected one-step reward of `strat` at state `s` against an opponent
/// action: sum over the owner's actions of strategy weight times reward.
inline double exp_rew(const ConcurrentGame& game, int s, const StationaryStrategy& strat,
                      int a_opp) {
  const auto& p = strat.probs[s];
  double out = 0.0;
  for (int a = 0; a < static_cast<int>(p.size()); ++a) {
    if (p[a] == 0.0) continue;
    out += p[a] * (strat.player == 1 ? game.reward(s, a, a_opp) : game.reward(s, a_opp, a));
  }
  return out;
}

/// Expected potential one step ahead of state `s` when the players mix with
/// d1 and d2: sum over action pairs and successors of
/// d1(a1) d2(a2) delta(s,a1,a2)(s') potential[s'].
inline double one_st(const ConcurrentGame& game, const std::vector<double>& potential,
                     const std::vector<double>& d1, const std::vector<double>& d2, int s) {
  double out = 0.0;
  for (int a1 = 0; a1 < static_cast<int>(d1.size()); ++a1) {
    if (d1[a1] == 0.0) continue;
    for (int a2 = 0; a2 < static_cast<int>(d2.size()); ++a2) {
      if (d2[a2] == 0.0) continue;
      const double w = d1[a1] * d2[a2];
      for (const auto& e : game.successors(s, a1, a2)) {
        out += w * e.prob * potential[e.state];
      }
    }
  }
  return out;
}

namespace detail {

/// Opponent's decision problem once `strat` is fixed: expected rewards and
/// mixed transition rows per (state, opponent action).
struct InducedDecisionProcess {
  std::vector<std::vector<double>> reward;                  // [s][b]
  std::vector<std::vector<std::vector<Successor>>> rows;    // [s][b] sparse
};

inline InducedDecisionProcess induce_opponent_process(const ConcurrentGame& game,
                                                      const StationaryStrategy& strat) {
  const int n = game.n_states();
  const int owner = strat.player;
  InducedDecisionProcess out;
  out.reward.resize(n);
  out.rows.resize(n);
  std::vector<double> acc(n, 0.0);
  std::vector<int> touched;
  for (int s = 0; s < n; ++s) {
    const int nb = game.n_actions(owner == 1 ? 2 : 1, s);
    const int na = game.n_actions(owner, s);
    out.reward[s].resize(nb);
    out.rows[s].resize(nb);
    for (int b = 0; b < nb; ++b) {
      double rb = 0.0;
      touched.clear();
      for (int a = 0; a < na; ++a) {
        const double w = strat.probs[s][a];
        if (w == 0.0) continue;
        const int a1 = owner == 1 ? a : b;
        const int a2 = owner == 1 ? b : a;
        rb += w * game.reward(s, a1, a2);
        for (const auto& e : game.successors(s, a1, a2)) {
          if (acc[e.state] == 0.0) touched.push_back(e.state);
          acc[e.state] += w * e.prob;
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = out.rows[s][b];
      row.reserve(touched.size());
      for (int t : touched) {
        row.push_back({t, acc[t]});
        acc[t] = 0.0;
      }
      out.reward[s][b] = rb;
    }
  }
  return out;
}

}  // namespace detail

/// Solves the gain/potential optimality system for the opponent's best
/// response against a fixed strategy:
///
///   gain + v[s] = opt_b ( reward(s, strat, b) + sum_s' P(s' | s, strat, b) v[s'] )
///   v[target] = 0
///
/// where opt is min over opponent actions when evaluating a player-1
/// strategy and max when evaluating a player-2 strategy. The system is
/// solved by iterating opponent policy improvement against exact
/// Gaussian-elimination evaluations of the current policy; the fixed point
/// satisfies the optimality system up to linear-solve precision. The gain of
/// a player-1 strategy is a lower bound on the game value; of a player-2
/// strategy, an upper bound.
inline PotentialSolution evaluate_strategy(const ConcurrentGame& game,
                                           const StationaryStrategy& strat, int target = 0) {
  const int n = game.n_states();
  if (target < 0 || target >= n) throw std::invalid_argument("target state out of range");
  if (strat.player != 1 && strat.player != 2) throw std::invalid_argument("player must be 1 or 2");
  if (static_cast<int>(strat.probs.size()) != n)
    throw std::invalid_argument("strategy does not cover the game's states");
  const bool minimize = strat.player == 1;
  const int opponent = minimize ? 2 : 1;

  const auto mdp = detail::induce_opponent_process(game, strat);

  // Unknown layout: column 0 is the gain, then the potentials of every
  // state except target, in state order.
  auto col_of = [target](int s) { return s < target ? s + 1 : s; };

  std::vector<int> policy(n, 0);
  double gain = 0.0;
  std::vector<double> v(n, 0.0);

  auto action_value = [&](int s, int b) {
    double q = mdp.reward[s][b];
    for (const auto& e : mdp.rows[s][b]) q += e.prob * v[e.state];
    return q;
  };

  const int max_rounds = 1000;
  for (int round = 0;; ++round) {
    if (round == max_rounds)
      throw SolveError("best-response iteration did not converge; game may not be ergodic");

    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (int s = 0; s < n; ++s) {
      a[s][0] = 1.0;
      if (s != target) a[s][col_of(s)] += 1.0;
      for (const auto& e : mdp.rows[s][policy[s]]) {
        if (e.state != target) a[s][col_of(e.state)] -= e.prob;
      }
      b[s] = mdp.reward[s][policy[s]];
    }
    auto solved = solve_linear(std::move(a), std::move(b));
    if (!solved)
      throw SolveError("potential system is singular; game may not be ergodic");
    gain = (*solved)[0];
    v[target] = 0.0;
    for (int s = 0; s < n; ++s) {
      if (s != target) v[s] = (*solved)[col_of(s)];
    }

    bool changed = false;
    for (int s = 0; s < n; ++s) {
      const int nb = static_cast<int>(mdp.reward[s].size());
      double opt = action_value(s, 0);
      for (int bb = 1; bb < nb; ++bb) {
        const double q = action_value(s, bb);
        if (minimize ? q < opt : q > opt) opt = q;
      }
      const double current = action_value(s, policy[s]);
      if (minimize ? current > opt + kImprovementTolerance
                   : current < opt - kImprovementTolerance) {
        for (int bb = 0; bb < nb; ++bb) {
          if (std::abs(action_value(s, bb) - opt) <= 1e-12) {
            policy[s] = bb;
            break;
          }
        }
        changed = true;
      }
    }
    if (!changed) break;
  }

  PotentialSolution out;
  out.gain = gain;
  out.potential = v;
  out.target_state = target;
  out.best_response.player = opponent;
  out.best_response.probs.resize(n);
  for (int s = 0; s < n; ++s) {
    const int nb = static_cast<int>(mdp.reward[s].size());
    // Lowest-indexed action whose constraint is tight; the converged policy
    // action is the fallback.
    int chosen = policy[s];
    const double base = gain + v[s];
    for (int bb = 0; bb < nb; ++bb) {
      const double slack = minimize ? action_value(s, bb) - base : base - action_value(s, bb);
      if (slack < kEvalSlackTolerance) {
        chosen = bb;
        break;
      }
    }
    out.best_response.probs[s].assign(nb, 0.0);
    out.best_response.probs[s][chosen] = 1.0;
  }
  return out;
}

}  // namespace ergo
