#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergo {

/// Tolerance used when checking that probability distributions sum to 1.
inline constexpr double kProbTolerance = 1e-9;

/// Raised when a solver step fails (singular system, non-terminating
/// pivoting, evaluation of a game that does not appear to be ergodic).
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One sparse transition-target: successor state and its probability.
struct Successor {
  int state = 0;
  double prob = 0.0;

  friend bool operator==(const Successor&, const Successor&) = default;
};

/// Clamps negligible negative entries (rounding noise) to zero.
inline void clamp_small_negatives(std::vector<double>& p, double tol = 1e-9) {
  for (double& x : p) {
    if (x < 0.0) {
      if (x < -tol) throw std::invalid_argument("negative probability beyond tolerance");
      x = 0.0;
    }
  }
}

/// Makes `p` sum to exactly 1.0: divides by the total, then assigns the
/// leftover rounding mass to the largest entry.
inline void normalize_distribution(std::vector<double>& p) {
  double total = 0.0;
  for (double x : p) total += x;
  if (!(total > 0.0)) throw std::invalid_argument("cannot normalize distribution with mass 0");
  for (double& x : p) x /= total;
  double sum = 0.0;
  for (double x : p) sum += x;
  auto largest = std::max_element(p.begin(), p.end());
  *largest += 1.0 - sum;
}

/// An explicit two-player concurrent stochastic game: per-state action sets
/// for both players, and a total table mapping every (state, a1, a2) to a
/// reward and a sparse distribution over successor states.
///
/// Construction is two-phase: create with the action labels, then fill every
/// entry with set_entry. Instances are immutable afterwards and safe to share
/// across threads.
class ConcurrentGame {
 public:
  ConcurrentGame(std::vector<std::vector<std::string>> actions_p1,
                 std::vector<std::vector<std::string>> actions_p2)
      : actions_p1_(std::move(actions_p1)), actions_p2_(std::move(actions_p2)) {
    if (actions_p1_.size() != actions_p2_.size())
      throw std::invalid_argument("player action tables disagree on the number of states");
    n_states_ = static_cast<int>(actions_p1_.size());
    if (n_states_ == 0) throw std::invalid_argument("game must have at least one state");
    offsets_.resize(n_states_ + 1, 0);
    for (int s = 0; s < n_states_; ++s) {
      offsets_[s + 1] = offsets_[s] + actions_p1_[s].size() * actions_p2_[s].size();
    }
    rewards_.assign(offsets_.back(), 0.0);
    dists_.resize(offsets_.back());
    defined_.assign(offsets_.back(), 0);
  }

  int n_states() const { return n_states_; }

  int n_actions(int player, int s) const {
    check_state(s);
    const auto& table = (player == 1) ? actions_p1_ : actions_p2_;
    return static_cast<int>(table[s].size());
  }

  const std::vector<std::string>& action_labels(int player, int s) const {
    check_state(s);
    return (player == 1) ? actions_p1_[s] : actions_p2_[s];
  }

  void set_entry(int s, int a1, int a2, double reward, std::vector<Successor> dist) {
    std::size_t k = index(s, a1, a2);
    rewards_[k] = reward;
    dists_[k] = std::move(dist);
    defined_[k] = 1;
  }

  bool has_entry(int s, int a1, int a2) const { return defined_[index(s, a1, a2)] != 0; }

  double reward(int s, int a1, int a2) const { return rewards_[index(s, a1, a2)]; }

  const std::vector<Successor>& successors(int s, int a1, int a2) const {
    return dists_[index(s, a1, a2)];
  }

  /// Size of the transition relation: total support over all entries.
  std::size_t transition_size() const {
    std::size_t total = 0;
    for (const auto& d : dists_) total += d.size();
    return total;
  }

  /// Largest per-state action count over both players.
  int max_actions() const {
    std::size_t m = 0;
    for (int s = 0; s < n_states_; ++s) {
      m = std::max({m, actions_p1_[s].size(), actions_p2_[s].size()});
    }
    return static_cast<int>(m);
  }

  friend bool operator==(const ConcurrentGame& a, const ConcurrentGame& b) {
    return a.actions_p1_ == b.actions_p1_ && a.actions_p2_ == b.actions_p2_ &&
           a.rewards_ == b.rewards_ && a.dists_ == b.dists_ && a.defined_ == b.defined_;
  }

 private:
  void check_state(int s) const {
    if (s < 0 || s >= n_states_) throw std::out_of_range("state index out of range");
  }

  std::size_t index(int s, int a1, int a2) const {
    check_state(s);
    const int n1 = static_cast<int>(actions_p1_[s].size());
    const int n2 = static_cast<int>(actions_p2_[s].size());
    if (a1 < 0 || a1 >= n1) throw std::out_of_range("player-1 action index out of range");
    if (a2 < 0 || a2 >= n2) throw std::out_of_range("player-2 action index out of range");
    return offsets_[s] + static_cast<std::size_t>(a1) * n2 + a2;
  }

  int n_states_ = 0;
  std::vector<std::vector<std::string>> actions_p1_, actions_p2_;
  std::vector<std::size_t> offsets_;
  std::vector<double> rewards_;
  std::vector<std::vector<Successor>> dists_;
  std::vector<char> defined_;
};

/// A per-state mixed action choice for one player.
struct StationaryStrategy {
  int player = 1;  // 1 or 2
  std::vector<std::vector<double>> probs;

  friend bool operator==(const StationaryStrategy&, const StationaryStrategy&) = default;
};

/// A structural defect found by validation; coordinates are -1 when they do
/// not apply.
struct Violation {
  int state = -1;
  int a1 = -1;
  int a2 = -1;
  std::string message;

  std::string to_string() const {
    std::string where;
    if (state >= 0) where += "state " + std::to_string(state);
    if (a1 >= 0) where += ", a1 " + std::to_string(a1);
    if (a2 >= 0) where += ", a2 " + std::to_string(a2);
    if (where.empty()) return message;
    return where + ": " + message;
  }
};

/// Checks every structural invariant of a game. Returns one entry per
/// violation; an empty result means the game is well-formed.
inline std::vector<Violation> validate(const ConcurrentGame& game) {
  std::vector<Violation> out;
  const int n = game.n_states();
  for (int s = 0; s < n; ++s) {
    for (int player : {1, 2}) {
      if (game.n_actions(player, s) == 0) {
        out.push_back({s, -1, -1,
                       "player " + std::to_string(player) + " has no actions"});
      }
    }
    for (int a1 = 0; a1 < game.n_actions(1, s); ++a1) {
      for (int a2 = 0; a2 < game.n_actions(2, s); ++a2) {
        if (!game.has_entry(s, a1, a2)) {
          out.push_back({s, a1, a2, "transition/reward entry undefined"});
          continue;
        }
        if (!std::isfinite(game.reward(s, a1, a2))) {
          out.push_back({s, a1, a2, "reward is not finite"});
        }
        const auto& dist = game.successors(s, a1, a2);
        if (dist.empty()) {
          out.push_back({s, a1, a2, "empty successor distribution"});
          continue;
        }
        double mass = 0.0;
        std::vector<char> seen(n, 0);
        for (const auto& e : dist) {
          if (e.state < 0 || e.state >= n) {
            out.push_back({s, a1, a2,
                           "successor state " + std::to_string(e.state) + " out of range"});
            continue;
          }
          if (seen[e.state]) {
            out.push_back({s, a1, a2,
                           "duplicate successor state " + std::to_string(e.state)});
          }
          seen[e.state] = 1;
          if (!(e.prob >= 0.0) || e.prob > 1.0) {
            out.push_back({s, a1, a2, "probability " + std::to_string(e.prob) +
                                          " outside [0, 1]"});
          }
          mass += e.prob;
        }
        if (std::abs(mass - 1.0) > kProbTolerance) {
          out.push_back({s, a1, a2,
                         "distribution mass " + std::to_string(mass) + " != 1"});
        }
      }
    }
  }
  return out;
}

/// Checks a strategy against the game it is meant for.
inline std::vector<Violation> validate(const ConcurrentGame& game,
                                       const StationaryStrategy& strat) {
  std::vector<Violation> out;
  if (strat.player != 1 && strat.player != 2) {
    out.push_back({-1, -1, -1, "strategy player must be 1 or 2"});
    return out;
  }
  if (static_cast<int>(strat.probs.size()) != game.n_states()) {
    out.push_back({-1, -1, -1,
                   "strategy covers " + std::to_string(strat.probs.size()) + " states, game has " +
                       std::to_string(game.n_states())});
    return out;
  }
  for (int s = 0; s < game.n_states(); ++s) {
    const auto& p = strat.probs[s];
    const int expect = game.n_actions(strat.player, s);
    if (static_cast<int>(p.size()) != expect) {
      out.push_back({s, -1, -1,
                     "distribution over " + std::to_string(p.size()) + " actions, state offers " +
                         std::to_string(expect)});
      continue;
    }
    double mass = 0.0;
    for (double x : p) {
      if (!(x >= 0.0) || x > 1.0) {
        out.push_back({s, -1, -1, "probability " + std::to_string(x) + " outside [0, 1]"});
      }
      mass += x;
    }
    if (std::abs(mass - 1.0) > kProbTolerance) {
      out.push_back({s, -1, -1, "strategy mass " + std::to_string(mass) + " != 1"});
    }
  }
  return out;
}

/// Sufficient ergodicity test. Builds the graph whose edge s -> s' exists
/// iff s' is in the support of delta(s, a1, a2) for *every* action pair at s,
/// and reports whether that graph is strongly connected. True implies the
/// game is ergodic; false is inconclusive.
inline bool ergodic_sufficient(const ConcurrentGame& game) {
  const int n = game.n_states();
  if (n == 1) return true;

  std::vector<std::vector<int>> fwd(n), rev(n);
  std::vector<char> in_common(n, 0);
  for (int s = 0; s < n; ++s) {
    bool first = true;
    std::vector<int> common;
    for (int a1 = 0; a1 < game.n_actions(1, s); ++a1) {
      for (int a2 = 0; a2 < game.n_actions(2, s); ++a2) {
        if (!game.has_entry(s, a1, a2)) return false;
        std::vector<int> supp;
        for (const auto& e : game.successors(s, a1, a2)) {
          if (e.prob > 0.0) supp.push_back(e.state);
        }
        std::sort(supp.begin(), supp.end());
        if (first) {
          common = std::move(supp);
          first = false;
        } else {
          std::vector<int> next;
          std::set_intersection(common.begin(), common.end(), supp.begin(), supp.end(),
                                std::back_inserter(next));
          common = std::move(next);
        }
        if (common.empty()) return false;
      }
    }
    for (int t : common) {
      fwd[s].push_back(t);
      rev[t].push_back(s);
    }
  }

  auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(rev);
}

/// Uniform distribution over the player's actions at every state.
inline StationaryStrategy uniform_strategy(const ConcurrentGame& game, int player) {
  if (player != 1 && player != 2) throw std::invalid_argument("player must be 1 or 2");
  StationaryStrategy out;
  out.player = player;
  out.probs.resize(game.n_states());
  for (int s = 0; s < game.n_states(); ++s) {
    const int k = game.n_actions(player, s);
    out.probs[s].assign(k, 1.0 / k);
    normalize_distribution(out.probs[s]);
  }
  return out;
}

}  // namespace ergo
