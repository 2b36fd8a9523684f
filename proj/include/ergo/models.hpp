#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergo/game.hpp"

namespace ergo {

// ---------------------------------------------------------------------------
// Pool attractiveness (shared by the mining-pool models)
// ---------------------------------------------------------------------------

struct AttractivenessResult {
  double r_a = 0.0;
  double r_b = 0.0;
  double attr_a = 0.0;
  double attr_b = 0.0;
  double attr_c = 0.0;
};

/// Solves the revenue/attractiveness fixed point for two pools attacking
/// each other with infiltration fractions alpha_prime and beta_prime:
///
///   r_A = (alpha - alpha') + alpha' * attr_B,   attr_A = r_A / (alpha + beta')
///   r_B = (beta  - beta')  + beta'  * attr_A,   attr_B = r_B / (beta + alpha')
///
/// a 2x2 linear system in (r_A, r_B). Independent miners have
/// attr_C = 1 / (1 - alpha' - beta'); their revenue is the remainder after
/// normalizing r_A + r_B + r_C = 1.
inline AttractivenessResult solve_attractiveness(double alpha, double beta, double alpha_prime,
                                                 double beta_prime) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("pool powers must be positive");
  if (alpha + beta > 1.0 + 1e-12)
    throw std::invalid_argument("pool powers must not exceed the network total");
  if (alpha_prime < 0.0 || alpha_prime >= alpha)
    throw std::invalid_argument("attack fraction alpha' must lie in [0, alpha)");
  if (beta_prime < 0.0 || beta_prime >= beta)
    throw std::invalid_argument("attack fraction beta' must lie in [0, beta)");

  const double k1 = alpha_prime / (beta + alpha_prime);
  const double k2 = beta_prime / (alpha + beta_prime);
  const double det = 1.0 - k1 * k2;
  if (!(det > 0.0)) throw SolveError("attractiveness system is singular");

  AttractivenessResult out;
  const double c1 = alpha - alpha_prime;
  const double c2 = beta - beta_prime;
  out.r_a = (c1 + k1 * c2) / det;
  out.r_b = (c2 + k2 * c1) / det;
  out.attr_a = out.r_a / (alpha + beta_prime);
  out.attr_b = out.r_b / (beta + alpha_prime);
  out.attr_c = 1.0 / (1.0 - alpha_prime - beta_prime);
  return out;
}

namespace detail {

/// Grid random walk of one pool's discretized power: the more attractive
/// pool gains a unit with probability 2/3, retains with 1/6 and loses with
/// 1/6; the less attractive one has the gain/lose probabilities swapped.
/// At the grid edge the impossible move's mass folds into "retain".
inline std::vector<std::pair<int, double>> pool_power_walk(int i, int n, bool most_attractive) {
  const double up = most_attractive ? 2.0 / 3.0 : 1.0 / 6.0;
  const double stay = 1.0 / 6.0;
  const double down = most_attractive ? 1.0 / 6.0 : 2.0 / 3.0;
  std::vector<std::pair<int, double>> out;
  double stay_mass = stay;
  if (i == 1) {
    stay_mass += down;
  } else {
    out.emplace_back(i - 1, down);
  }
  if (i == n) {
    stay_mass += up;
  } else {
    out.emplace_back(i + 1, up);
  }
  out.emplace_back(i, stay_mass);
  return out;
}

inline std::vector<Successor> to_successors(const std::map<int, double>& mass) {
  std::vector<Successor> dist;
  dist.reserve(mass.size());
  for (const auto& [state, p] : mass) dist.push_back({state, p});
  // Exact renormalization: park the rounding residue on the largest entry.
  double sum = 0.0;
  for (const auto& e : dist) sum += e.prob;
  Successor* largest = &dist[0];
  for (auto& e : dist) {
    if (e.prob > largest->prob) largest = &e;
  }
  largest->prob += 1.0 - sum;
  return dist;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Block-withholding pool attack
// ---------------------------------------------------------------------------

/// Two proof-of-work pools that can infiltrate each other with part of their
/// hash power. States are the discretized power pair (i1, i2) on {1..n}^2
/// with unit epsilon = 1/(2n+1); at (i1, i2) pool A chooses an attack level
/// in {0..i1-1} and pool B in {0..i2-1}. The reward is pool A's revenue
/// share r_A and both powers follow attractiveness-driven random walks.
struct BlockWithholdingParams {
  int n = 10;

  double epsilon() const { return 1.0 / (2 * n + 1); }
};

inline ConcurrentGame gen_block_withholding(const BlockWithholdingParams& params) {
  const int n = params.n;
  if (n < 2) throw std::invalid_argument("block-withholding grid needs n >= 2");
  const double eps = params.epsilon();

  auto state_id = [n](int i1, int i2) { return (i1 - 1) * n + (i2 - 1); };

  std::vector<std::vector<std::string>> acts1(n * n), acts2(n * n);
  for (int i1 = 1; i1 <= n; ++i1) {
    for (int i2 = 1; i2 <= n; ++i2) {
      const int s = state_id(i1, i2);
      for (int x = 0; x < i1; ++x) acts1[s].push_back("attack-" + std::to_string(x));
      for (int y = 0; y < i2; ++y) acts2[s].push_back("attack-" + std::to_string(y));
    }
  }
  ConcurrentGame game(std::move(acts1), std::move(acts2));

  for (int i1 = 1; i1 <= n; ++i1) {
    for (int i2 = 1; i2 <= n; ++i2) {
      const int s = state_id(i1, i2);
      for (int x = 0; x < i1; ++x) {
        for (int y = 0; y < i2; ++y) {
          const auto att = solve_attractiveness(i1 * eps, i2 * eps, x * eps, y * eps);
          // Attractiveness ties count both pools as the most attractive.
          const bool a_best = att.attr_a >= att.attr_b - 1e-12;
          const bool b_best = att.attr_b >= att.attr_a - 1e-12;
          const auto walk_a = detail::pool_power_walk(i1, n, a_best);
          const auto walk_b = detail::pool_power_walk(i2, n, b_best);
          std::map<int, double> mass;
          for (const auto& [na, pa] : walk_a) {
            for (const auto& [nb, pb] : walk_b) {
              mass[state_id(na, nb)] += pa * pb;
            }
          }
          game.set_entry(s, x, y, att.r_a, detail::to_successors(mass));
        }
      }
    }
  }
  return game;
}

// ---------------------------------------------------------------------------
// Zero-confirmation double-spending
// ---------------------------------------------------------------------------

/// Seller versus malicious buyer under zero-confirmation payments. State 0
/// is the shuffling state (the seller is re-entering the network); state i
/// in {1..n} carries double-spend success probability
/// p_i = 0.1 + (i-1)*0.4/n. The seller picks whether to reset his
/// connection and whether to require a confirmation; the buyer picks the
/// attacked amount d in {1..max_attack}.
struct DoubleSpendParams {
  int n = 100;
  double p_dc = 0.001;             // spontaneous disconnect probability
  double profit_ratio = 0.5;       // seller's profit margin p
  double impatient_fraction = 0.5; // honest customers lost while confirming
  int max_attack = 20;
  double honest_volume = 10.0;     // honest purchases per round

  double success_prob(int i) const { return 0.1 + (i - 1) * 0.4 / n; }
};

inline ConcurrentGame gen_double_spend(const DoubleSpendParams& params) {
  const int n = params.n;
  if (n < 2) throw std::invalid_argument("double-spend model needs n >= 2");
  if (params.max_attack < 1) throw std::invalid_argument("max_attack must be >= 1");

  const std::vector<std::string> seller = {"sell", "reconnect", "confirm", "reconnect-confirm"};
  std::vector<std::vector<std::string>> acts1(n + 1), acts2(n + 1);
  acts1[0] = {"shuffle"};
  acts2[0] = {"idle"};
  std::vector<std::string> buyer;
  for (int d = 1; d <= params.max_attack; ++d) buyer.push_back("spend-" + std::to_string(d));
  for (int s = 1; s <= n; ++s) {
    acts1[s] = seller;
    acts2[s] = buyer;
  }
  ConcurrentGame game(std::move(acts1), std::move(acts2));

  {
    std::map<int, double> mass;
    for (int i = 1; i <= n; ++i) mass[i] = 1.0 / n;
    game.set_entry(0, 0, 0, 0.0, detail::to_successors(mass));
  }

  const double p = params.profit_ratio;
  const double f = params.impatient_fraction;
  for (int s = 1; s <= n; ++s) {
    const double ps = params.success_prob(s);
    for (int a1 = 0; a1 < 4; ++a1) {
      const bool reconnect = (a1 == 1 || a1 == 3);
      const bool confirm = (a1 == 2 || a1 == 3);
      const double pa = confirm ? 0.0 : ps;
      for (int d = 1; d <= params.max_attack; ++d) {
        const double attacked = d * p * (1.0 - pa) - d * (1.0 - p) * pa;
        const double honest = confirm ? params.honest_volume * p * (1.0 - f)
                                      : params.honest_volume * p;
        const double reward = attacked + honest;

        std::vector<Successor> dist;
        if (reconnect) {
          dist = {{0, 1.0}};
        } else {
          std::map<int, double> mass;
          mass[n] += pa;  // a successful attack repeats from the best attack state
          mass[0] += params.p_dc * (1.0 - pa);
          std::vector<int> neighborhood;
          for (int t : {s - 1, s, s + 1}) {
            if (t >= 1 && t <= n) neighborhood.push_back(t);
          }
          for (int t : neighborhood) {
            mass[t] += (1.0 - params.p_dc) * (1.0 - pa) / neighborhood.size();
          }
          dist = detail::to_successors(mass);
        }
        game.set_entry(s, a1, d - 1, reward, std::move(dist));
      }
    }
  }
  return game;
}

// ---------------------------------------------------------------------------
// Proof-of-stake pool attack
// ---------------------------------------------------------------------------

/// P[X <= x] for X Poisson-distributed with rate lambda: 0 below the
/// support, otherwise the series sum up to floor(x).
inline double poisson_cdf(double lambda, double x) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("poisson_cdf requires lambda >= 0");
  if (x < 0.0) return 0.0;
  const long long kmax = static_cast<long long>(std::floor(x));
  double term = std::exp(-lambda);
  double sum = term;
  for (long long k = 1; k <= kmax; ++k) {
    term *= lambda / static_cast<double>(k);
    sum += term;
  }
  return std::min(sum, 1.0);
}

/// Two proof-of-stake pools that may refuse to sign each other's blocks.
/// States (i, j, p): stakes i*eps and j*eps on {1..n} with eps = 1/(2n+1),
/// and network connectivity p on the grid {0, p_step, ..., 1}. Both pools
/// choose sign/refuse; stake migration follows the attractiveness walks and
/// p drifts to a neighboring grid value.
struct ProofOfStakeParams {
  int n = 3;
  double p_step = 0.01;
  double mining_reward = 10.0;

  double epsilon() const { return 1.0 / (2 * n + 1); }

  int p_levels() const {
    const double inv = 1.0 / p_step;
    const long long k = std::llround(inv);
    if (!(p_step > 0.0) || p_step > 1.0 || std::abs(inv - static_cast<double>(k)) > 1e-9) {
      throw std::invalid_argument("p_step must divide 1 evenly");
    }
    return static_cast<int>(k) + 1;
  }
};

namespace detail {

/// Probability that a block mined by the pool with stake `own` collects a
/// majority of stake signatures, given whether the rival pool signs.
/// Independent signatures follow the Poisson CDF at rate lambda.
inline double pos_accept_prob(double own, double rival, bool rival_signs, double lambda) {
  if (own >= 0.5) return 1.0;
  if (rival_signs) {
    if (own + rival >= 0.5) return 1.0;
    return 1.0 - poisson_cdf(lambda, 0.5 - own - rival);
  }
  return 1.0 - poisson_cdf(lambda, 0.5 - own);
}

/// Expected per-round revenue of a pool: mining fees when elected and
/// accepted, signing fees on the rival's blocks when it signs them, and
/// signing fees on its own and independent blocks.
inline double pos_pool_revenue(double own, double rival, bool own_signs, bool rival_signs,
                               double lambda, double mining_reward) {
  const double mining = mining_reward * own * pos_accept_prob(own, rival, rival_signs, lambda);
  const double signing_rival = own_signs ? rival * own : 0.0;
  const double signing_rest = own * (1.0 - rival);
  return mining + signing_rival + signing_rest;
}

}  // namespace detail

inline ConcurrentGame gen_proof_of_stake(const ProofOfStakeParams& params) {
  const int n = params.n;
  if (n < 2) throw std::invalid_argument("proof-of-stake model needs n >= 2");
  const int levels = params.p_levels();
  const double eps = params.epsilon();

  auto state_id = [n, levels](int i, int j, int k) {
    return ((i - 1) * n + (j - 1)) * levels + k;
  };
  const int n_states = n * n * levels;

  const std::vector<std::string> acts = {"sign", "refuse"};
  ConcurrentGame game(std::vector<std::vector<std::string>>(n_states, acts),
                      std::vector<std::vector<std::string>>(n_states, acts));

  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      for (int k = 0; k < levels; ++k) {
        const int s = state_id(i, j, k);
        const double p = static_cast<double>(k) / (levels - 1);
        const double lambda = (1.0 - i * eps - j * eps) * p;
        for (int a1 = 0; a1 < 2; ++a1) {
          for (int a2 = 0; a2 < 2; ++a2) {
            const bool a_signs = a1 == 0;
            const bool b_signs = a2 == 0;
            const double rev_a = detail::pos_pool_revenue(i * eps, j * eps, a_signs, b_signs,
                                                          lambda, params.mining_reward);
            const double rev_b = detail::pos_pool_revenue(j * eps, i * eps, b_signs, a_signs,
                                                          lambda, params.mining_reward);
            const double attr_a = rev_a / (i * eps);
            const double attr_b = rev_b / (j * eps);
            const bool a_best = attr_a >= attr_b - 1e-12;
            const bool b_best = attr_b >= attr_a - 1e-12;

            const auto walk_a = detail::pool_power_walk(i, n, a_best);
            const auto walk_b = detail::pool_power_walk(j, n, b_best);
            // Connectivity stays or moves to a neighboring grid value with
            // equal probability; a missing neighbor's share is split between
            // the remaining options.
            std::vector<std::pair<int, double>> walk_p;
            if (k == 0) {
              walk_p = {{0, 0.5}, {1, 0.5}};
            } else if (k == levels - 1) {
              walk_p = {{k - 1, 0.5}, {k, 0.5}};
            } else {
              walk_p = {{k - 1, 1.0 / 3.0}, {k, 1.0 / 3.0}, {k + 1, 1.0 / 3.0}};
            }

            std::map<int, double> mass;
            for (const auto& [ni, pa] : walk_a) {
              for (const auto& [nj, pb] : walk_b) {
                for (const auto& [nk, pk] : walk_p) {
                  mass[state_id(ni, nj, nk)] += pa * pb * pk;
                }
              }
            }
            game.set_entry(s, a1, a2, rev_a, detail::to_successors(mass));
          }
        }
      }
    }
  }
  return game;
}

// ---------------------------------------------------------------------------
// Repetitive rock-paper-scissors
// ---------------------------------------------------------------------------

/// Repeated rock-paper-scissors in laps: a lap ends when one player gets
/// three round wins ahead. States -2..2 (stored as 0..4) track player 1's
/// round lead; ties split the round 50/50. With noise > 0 each player may
/// drop the round with probability noise/2 (a lost connection loses the
/// round), which makes the game ergodic. The asymmetric variant rewards
/// player 1's lap wins as in the base game; the symmetric variant uses
/// antisymmetric +/-1 expected lap rewards, so its value is 0.
inline ConcurrentGame gen_rps(double noise, bool symmetric) {
  if (noise < 0.0 || noise >= 1.0) throw std::invalid_argument("noise must lie in [0, 1)");
  const int n_states = 5;
  auto idx = [](int s) { return s + 2; };  // s in -2..2

  const std::vector<std::string> acts = {"R", "P", "S"};
  ConcurrentGame game(std::vector<std::vector<std::string>>(n_states, acts),
                      std::vector<std::vector<std::string>>(n_states, acts));

  auto beats = [](int a, int b) {
    return (a == 0 && b == 2) || (a == 1 && b == 0) || (a == 2 && b == 1);
  };

  for (int s = -2; s <= 2; ++s) {
    const int up = (s == 2) ? 0 : s + 1;    // player 1 wins the round
    const int down = (s == -2) ? 0 : s - 1; // player 2 wins the round
    for (int a1 = 0; a1 < 3; ++a1) {
      for (int a2 = 0; a2 < 3; ++a2) {
        double w1;  // chance player 1 takes the round, before noise
        if (beats(a1, a2)) {
          w1 = 1.0;
        } else if (beats(a2, a1)) {
          w1 = 0.0;
        } else {
          w1 = 0.5;
        }
        std::map<int, double> mass;
        if (w1 > 0.0) mass[idx(up)] += (1.0 - noise) * w1;
        if (w1 < 1.0) mass[idx(down)] += (1.0 - noise) * (1.0 - w1);
        if (noise > 0.0) {
          mass[idx(up)] += noise / 2.0;    // player 2 dropped the round
          mass[idx(down)] += noise / 2.0;  // player 1 dropped the round
        }

        double reward = 0.0;
        if (symmetric) {
          const double win1 = (1.0 - noise) * w1 + noise / 2.0;
          if (s == 2) reward = win1;            // player 1 may close out a lap
          if (s == -2) reward = -(1.0 - win1);  // player 2 may close out a lap
        } else {
          if (s == 2) {
            if (beats(a1, a2)) {
              reward = 1.0;
            } else if (a1 == a2) {
              reward = 0.5;
            }
          }
        }
        game.set_entry(idx(s), a1, a2, reward, detail::to_successors(mass));
      }
    }
  }
  return game;
}

}  // namespace ergo
