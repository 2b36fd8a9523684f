#include "ergo/simulate.hpp"

#include <gtest/gtest.h>

#include <random>

#include "ergo/mdp_eval.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using ergo::StationaryStrategy;

TEST(Simulate, ConstantRewardGameIsExact) {
  const auto game = fixtures::constant_reward(3.7, 2);
  const auto u1 = ergo::uniform_strategy(game, 1);
  const auto u2 = ergo::uniform_strategy(game, 2);
  const auto result = ergo::simulate_profile(game, u1, u2, 0, 10000, 8, 42);
  EXPECT_NEAR(result.mean_payoff_estimate, 3.7, 1e-12);
  EXPECT_EQ(result.half_width_95, 0.0);
}

TEST(Simulate, DeterministicCycleAveragesExactly) {
  const auto game = fixtures::two_state_cycle();
  const auto u1 = ergo::uniform_strategy(game, 1);
  const auto u2 = ergo::uniform_strategy(game, 2);
  const auto result = ergo::simulate_profile(game, u1, u2, 0, 10000, 4, 1);
  EXPECT_DOUBLE_EQ(result.mean_payoff_estimate, 1.0);
  EXPECT_EQ(result.half_width_95, 0.0);
}

TEST(Simulate, SeedDeterminism) {
  std::mt19937_64 rng(101);
  const auto game = oracle::random_game(rng, 4, 3);
  const auto s1 = oracle::random_strategy(rng, game, 1);
  const auto s2 = oracle::random_strategy(rng, game, 2);
  const auto a = ergo::simulate_profile(game, s1, s2, 0, 5000, 8, 99);
  const auto b = ergo::simulate_profile(game, s1, s2, 0, 5000, 8, 99);
  EXPECT_EQ(a.mean_payoff_estimate, b.mean_payoff_estimate);
  EXPECT_EQ(a.half_width_95, b.half_width_95);
  const auto c = ergo::simulate_profile(game, s1, s2, 0, 5000, 8, 100);
  EXPECT_NE(a.mean_payoff_estimate, c.mean_payoff_estimate);
}

TEST(Simulate, WorkerCountDoesNotChangeResults) {
  std::mt19937_64 rng(103);
  const auto game = oracle::random_game(rng, 3, 2);
  const auto s1 = oracle::random_strategy(rng, game, 1);
  const auto s2 = oracle::random_strategy(rng, game, 2);
  const auto seq = ergo::simulate_profile(game, s1, s2, 0, 2000, 8, 5, 1);
  const auto par = ergo::simulate_profile(game, s1, s2, 0, 2000, 8, 5, 4);
  EXPECT_EQ(seq.mean_payoff_estimate, par.mean_payoff_estimate);
  EXPECT_EQ(seq.half_width_95, par.half_width_95);
}

TEST(Simulate, StartStateImmaterialForErgodicGames) {
  std::mt19937_64 rng(107);
  const auto game = oracle::random_game(rng, 4, 2);
  const auto s1 = oracle::random_strategy(rng, game, 1);
  const auto s2 = oracle::random_strategy(rng, game, 2);
  const auto from0 = ergo::simulate_profile(game, s1, s2, 0, 200000, 16, 11);
  const auto from3 = ergo::simulate_profile(game, s1, s2, 3, 200000, 16, 12);
  EXPECT_NEAR(from0.mean_payoff_estimate, from3.mean_payoff_estimate,
              from0.half_width_95 + from3.half_width_95 + 1e-4);
}

TEST(Simulate, MatchesHandSolvableStationaryMean) {
  // Three-state cycle with one stochastic branch. Under the only profile the
  // chain is: 0 -> 1, 1 -> (0 w.p. 1/2, 2 w.p. 1/2), 2 -> 0 and rewards 1 on
  // state 0, 0 on 1, 4 on 2. Stationary distribution (2/5, 2/5, 1/5):
  // mean = 2/5 * 1 + 1/5 * 4 = 1.2.
  ergo::ConcurrentGame game({{"a"}, {"a"}, {"a"}}, {{"b"}, {"b"}, {"b"}});
  game.set_entry(0, 0, 0, 1.0, {{1, 1.0}});
  game.set_entry(1, 0, 0, 0.0, {{0, 0.5}, {2, 0.5}});
  game.set_entry(2, 0, 0, 4.0, {{0, 1.0}});
  const auto u1 = ergo::uniform_strategy(game, 1);
  const auto u2 = ergo::uniform_strategy(game, 2);
  const auto result = ergo::simulate_profile(game, u1, u2, 0, 1000000, 32, 2024);
  EXPECT_NEAR(result.mean_payoff_estimate, 1.2, 3.0 * result.half_width_95);
}

TEST(Simulate, RejectsBadArguments) {
  const auto game = fixtures::single_state(0.0);
  const auto u1 = ergo::uniform_strategy(game, 1);
  const auto u2 = ergo::uniform_strategy(game, 2);
  EXPECT_THROW(ergo::simulate_profile(game, u1, u2, 0, 0, 4, 1), std::invalid_argument);
  EXPECT_THROW(ergo::simulate_profile(game, u1, u2, 0, 10, 1, 1), std::invalid_argument);
  EXPECT_THROW(ergo::simulate_profile(game, u1, u2, 5, 10, 4, 1), std::invalid_argument);
  EXPECT_THROW(ergo::simulate_profile(game, u2, u1, 0, 10, 4, 1), std::invalid_argument);

  StationaryStrategy wrong{1, {{0.5, 0.5}}};
  EXPECT_THROW(ergo::simulate_profile(game, wrong, u2, 0, 10, 4, 1), std::invalid_argument);
}
