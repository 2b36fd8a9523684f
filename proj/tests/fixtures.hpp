// Small hand-built games shared across the test binaries.
#pragma once

#include <string>
#include <vector>

#include "ergo/game.hpp"

namespace fixtures {

// One state, one action each, a self-loop with the given reward.
inline ergo::ConcurrentGame single_state(double reward) {
  ergo::ConcurrentGame game({{"a"}}, {{"b"}});
  game.set_entry(0, 0, 0, reward, {{0, 1.0}});
  return game;
}

// Deterministic two-state cycle: reward 0 on 0 -> 1 and 2 on 1 -> 0.
inline ergo::ConcurrentGame two_state_cycle() {
  ergo::ConcurrentGame game({{"a"}, {"a"}}, {{"b"}, {"b"}});
  game.set_entry(0, 0, 0, 0.0, {{1, 1.0}});
  game.set_entry(1, 0, 0, 2.0, {{0, 1.0}});
  return game;
}

// One state where player 2 picks between self-loops worth 3 and 1.
inline ergo::ConcurrentGame p2_picks_reward() {
  ergo::ConcurrentGame game({{"a"}}, {{"hi", "lo"}});
  game.set_entry(0, 0, 0, 3.0, {{0, 1.0}});
  game.set_entry(0, 0, 1, 1.0, {{0, 1.0}});
  return game;
}

// Every reward equals `c`; two actions per player, uniform random moves.
inline ergo::ConcurrentGame constant_reward(double c, int n_states = 2) {
  std::vector<std::vector<std::string>> a1(n_states, {"a0", "a1"});
  std::vector<std::vector<std::string>> a2(n_states, {"b0", "b1"});
  ergo::ConcurrentGame game(std::move(a1), std::move(a2));
  std::vector<ergo::Successor> everywhere;
  for (int t = 0; t < n_states; ++t) {
    everywhere.push_back({t, 1.0 / n_states});
  }
  ergo::ConcurrentGame* g = &game;
  for (int s = 0; s < n_states; ++s) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        auto dist = everywhere;
        dist.back().prob += 1.0 - (1.0 / n_states) * n_states;
        g->set_entry(s, x, y, c, dist);
      }
    }
  }
  return game;
}

}  // namespace fixtures
