#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergo/game.hpp"
#include "ergo/parallel.hpp"

namespace ergo {

/// Monte-Carlo estimate of a strategy profile's mean payoff, with a batch
/// means 95% confidence half-width. `rng` records the generator algorithm so
/// runs are reproducible across implementations.
struct SimulationResult {
  double mean_payoff_estimate = 0.0;
  double half_width_95 = 0.0;
  long long steps = 0;
  int batches = 0;
  std::uint64_t seed = 0;
  std::string rng = "mt19937_64";
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits of the generator output;
/// avoids std::generate_canonical, whose output differs across standard
/// libraries.
inline double next_unit(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline int sample_cumulative(const std::vector<double>& cum, double u) {
  for (int i = 0; i < static_cast<int>(cum.size()); ++i) {
    if (u < cum[i]) return i;
  }
  return static_cast<int>(cum.size()) - 1;
}

}  // namespace detail

/// Plays `batches` independent random walks of `steps` steps under the fixed
/// profile (s1, s2), sampling actions from the strategies and successors
/// from the transition function, and returns the batch-mean finite-horizon
/// average reward. Batch b uses generator seed `seed + b`, so results are
/// deterministic for a fixed seed regardless of the worker count.
inline SimulationResult simulate_profile(const ConcurrentGame& game, const StationaryStrategy& s1,
                                         const StationaryStrategy& s2, int start, long long steps,
                                         int batches, std::uint64_t seed, int threads = 0) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (batches < 2) throw std::invalid_argument("batches must be >= 2");
  if (start < 0 || start >= game.n_states()) throw std::invalid_argument("start state out of range");
  for (const auto* strat : {&s1, &s2}) {
    const auto violations = validate(game, *strat);
    if (!violations.empty()) {
      throw std::invalid_argument("strategy does not fit the game: " +
                                  violations.front().to_string());
    }
  }
  if (s1.player != 1 || s2.player != 2)
    throw std::invalid_argument("simulate_profile expects (player-1, player-2) strategies");

  const int n = game.n_states();
  std::vector<std::vector<double>> cum1(n), cum2(n);
  for (int s = 0; s < n; ++s) {
    double acc = 0.0;
    for (double p : s1.probs[s]) cum1[s].push_back(acc += p);
    acc = 0.0;
    for (double p : s2.probs[s]) cum2[s].push_back(acc += p);
  }

  std::vector<double> batch_mean(batches, 0.0);
  parallel_chunks(batches, resolve_threads(threads), [&](int lo, int hi) {
    for (int b = lo; b < hi; ++b) {
      std::mt19937_64 eng(seed + static_cast<std::uint64_t>(b));
      int s = start;
      double sum = 0.0, comp = 0.0;  // Kahan-compensated reward total
      for (long long step = 0; step < steps; ++step) {
        const int a1 = detail::sample_cumulative(cum1[s], detail::next_unit(eng));
        const int a2 = detail::sample_cumulative(cum2[s], detail::next_unit(eng));
        const double y = game.reward(s, a1, a2) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        const auto& succ = game.successors(s, a1, a2);
        const double u = detail::next_unit(eng);
        double acc = 0.0;
        int next = succ.back().state;
        for (const auto& e : succ) {
          acc += e.prob;
          if (u < acc) {
            next = e.state;
            break;
          }
        }
        s = next;
      }
      batch_mean[b] = sum / static_cast<double>(steps);
    }
  });

  double mean = 0.0;
  for (double m : batch_mean) mean += m;
  mean /= batches;
  double var = 0.0;
  for (double m : batch_mean) var += (m - mean) * (m - mean);
  var /= (batches - 1);

  SimulationResult out;
  out.mean_payoff_estimate = mean;
  out.half_width_95 = 1.96 * std::sqrt(var / batches);
  out.steps = steps;
  out.batches = batches;
  out.seed = seed;
  return out;
}

}  // namespace ergo
