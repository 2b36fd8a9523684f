#include "ergo/models.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ergo/game.hpp"

using ergo::ConcurrentGame;

namespace {

double dist_mass_to(const ConcurrentGame& game, int s, int a1, int a2, int target) {
  for (const auto& e : game.successors(s, a1, a2)) {
    if (e.state == target) return e.prob;
  }
  return 0.0;
}

void expect_exact_unit_mass(const ConcurrentGame& game) {
  for (int s = 0; s < game.n_states(); ++s) {
    for (int a1 = 0; a1 < game.n_actions(1, s); ++a1) {
      for (int a2 = 0; a2 < game.n_actions(2, s); ++a2) {
        double mass = 0.0;
        for (const auto& e : game.successors(s, a1, a2)) mass += e.prob;
        ASSERT_EQ(mass, 1.0) << "state " << s << " a1 " << a1 << " a2 " << a2;
      }
    }
  }
}

}  // namespace

TEST(Attractiveness, NoAttackKeepsOwnPower) {
  const auto r = ergo::solve_attractiveness(0.3, 0.3, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(r.r_a, 0.3);
  EXPECT_DOUBLE_EQ(r.r_b, 0.3);
  EXPECT_DOUBLE_EQ(r.attr_a, 1.0);
  EXPECT_DOUBLE_EQ(r.attr_b, 1.0);
  EXPECT_DOUBLE_EQ(r.attr_c, 1.0);
  // Normalization leaves the independent miners the remaining revenue.
  EXPECT_NEAR(1.0 - r.r_a - r.r_b, 0.4, 1e-15);
}

TEST(Attractiveness, OneSidedAttackHandSolved) {
  const auto r = ergo::solve_attractiveness(0.3, 0.3, 0.1, 0.0);
  EXPECT_NEAR(r.r_b, 0.3, 1e-15);       // unaffected: B is not attacking
  EXPECT_NEAR(r.attr_b, 0.75, 1e-15);   // 0.3 / (0.3 + 0.1)
  EXPECT_NEAR(r.r_a, 0.275, 1e-15);     // 0.2 + 0.1 * 0.75
}

TEST(Attractiveness, IndependentMinersFormula) {
  const auto r = ergo::solve_attractiveness(0.3, 0.3, 0.1, 0.1);
  EXPECT_NEAR(r.attr_c, 1.25, 1e-15);  // 1 / (1 - 0.2)
}

TEST(Attractiveness, RejectsBadInputs) {
  EXPECT_THROW(ergo::solve_attractiveness(0.0, 0.3, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(ergo::solve_attractiveness(0.3, 0.3, 0.3, 0.0), std::invalid_argument);
  EXPECT_THROW(ergo::solve_attractiveness(0.3, 0.3, 0.0, 0.4), std::invalid_argument);
  EXPECT_THROW(ergo::solve_attractiveness(0.6, 0.6, 0.0, 0.0), std::invalid_argument);
}

TEST(BlockWithholding, StateAndActionCounts) {
  const auto game = ergo::gen_block_withholding({10});
  EXPECT_EQ(game.n_states(), 100);
  // State (1,1) is index 0: a single no-attack action per player.
  EXPECT_EQ(game.n_actions(1, 0), 1);
  EXPECT_EQ(game.n_actions(2, 0), 1);
  // State (10,10) is the last index: ten attack levels each.
  EXPECT_EQ(game.n_actions(1, 99), 10);
  EXPECT_EQ(game.n_actions(2, 99), 10);
  EXPECT_EQ(game.action_labels(1, 99)[3], "attack-3");
}

TEST(BlockWithholding, ValidErgodicExactMass) {
  const auto game = ergo::gen_block_withholding({6});
  EXPECT_TRUE(ergo::validate(game).empty());
  EXPECT_TRUE(ergo::ergodic_sufficient(game));
  expect_exact_unit_mass(game);
}

TEST(BlockWithholding, JointMigrationIsProductOfIndependentWalks) {
  const int n = 10;
  const auto game = ergo::gen_block_withholding({n});
  // Interior state (5,5), A attacks with 0 and B with 4 units: B's revenue
  // is diluted, so A is strictly more attractive and drifts up while B
  // drifts down.
  const int i1 = 5, i2 = 5;
  const int s = (i1 - 1) * n + (i2 - 1);
  const double eps = 1.0 / (2 * n + 1);
  const auto att = ergo::solve_attractiveness(i1 * eps, i2 * eps, 0.0, 4 * eps);
  ASSERT_GT(att.attr_a, att.attr_b + 1e-12);

  const int up_a_down_b = (i1 + 1 - 1) * n + (i2 - 1 - 1);
  EXPECT_NEAR(dist_mass_to(game, s, 0, 4, up_a_down_b), (2.0 / 3.0) * (2.0 / 3.0), 1e-15);
  // Every joint move keeps probability at least 1/36.
  for (const auto& e : game.successors(s, 0, 4)) {
    EXPECT_GE(e.prob, 1.0 / 36.0 - 1e-15);
  }
}

TEST(BlockWithholding, RewardIsPoolARevenue) {
  const int n = 5;
  const auto game = ergo::gen_block_withholding({n});
  const double eps = 1.0 / (2 * n + 1);
  const int i1 = 3, i2 = 4;
  const int s = (i1 - 1) * n + (i2 - 1);
  const auto att = ergo::solve_attractiveness(i1 * eps, i2 * eps, 2 * eps, 1 * eps);
  EXPECT_DOUBLE_EQ(game.reward(s, 2, 1), att.r_a);
}

TEST(BlockWithholding, RevenueSplitIsNormalized) {
  const int n = 6;
  const double eps = 1.0 / (2 * n + 1);
  for (int i1 = 1; i1 <= n; ++i1) {
    for (int i2 = 1; i2 <= n; ++i2) {
      for (int x = 0; x < i1; ++x) {
        for (int y = 0; y < i2; ++y) {
          const auto att = ergo::solve_attractiveness(i1 * eps, i2 * eps, x * eps, y * eps);
          const double r_c = 1.0 - att.r_a - att.r_b;
          EXPECT_GE(r_c, -1e-12);
          EXPECT_NEAR(att.r_a + att.r_b + r_c, 1.0, 1e-12);
        }
      }
    }
  }
}

TEST(DoubleSpend, StateCountsAndSuccessProbabilities) {
  ergo::DoubleSpendParams params;
  params.n = 5;
  const auto game = ergo::gen_double_spend(params);
  EXPECT_EQ(game.n_states(), 6);
  EXPECT_NEAR(params.success_prob(3), 0.26, 1e-15);  // 0.1 + 2*0.4/5
  EXPECT_EQ(game.n_actions(1, 0), 1);
  EXPECT_EQ(game.n_actions(2, 0), 1);
  EXPECT_EQ(game.n_actions(1, 3), 4);
  EXPECT_EQ(game.n_actions(2, 3), 20);
}

TEST(DoubleSpend, ConfirmRewardComputation) {
  ergo::DoubleSpendParams params;
  params.n = 5;
  const auto game = ergo::gen_double_spend(params);
  // Waiting for confirmation blocks the attack entirely: the buyer's d=4
  // purchase earns 4 * 0.5 = 2 and honest impatient customers halve the
  // remaining volume: 10 * 0.5 * 0.5 = 2.5.
  EXPECT_NEAR(game.reward(2, 2, 3), 4.5, 1e-12);
}

TEST(DoubleSpend, ReconnectForcesShuffle) {
  ergo::DoubleSpendParams params;
  params.n = 4;
  const auto game = ergo::gen_double_spend(params);
  for (int s = 1; s <= 4; ++s) {
    for (int d = 0; d < 20; ++d) {
      for (int a1 : {1, 3}) {
        const auto& dist = game.successors(s, a1, d);
        ASSERT_EQ(dist.size(), 1u);
        EXPECT_EQ(dist[0].state, 0);
        EXPECT_EQ(dist[0].prob, 1.0);
      }
    }
  }
}

TEST(DoubleSpend, ShufflingStateIsUniformWithZeroReward) {
  ergo::DoubleSpendParams params;
  params.n = 4;
  const auto game = ergo::gen_double_spend(params);
  EXPECT_EQ(game.reward(0, 0, 0), 0.0);
  const auto& dist = game.successors(0, 0, 0);
  ASSERT_EQ(dist.size(), 4u);
  for (const auto& e : dist) EXPECT_NEAR(e.prob, 0.25, 1e-15);
}

TEST(DoubleSpend, SuccessfulAttackMovesToBestAttackState) {
  ergo::DoubleSpendParams params;
  params.n = 5;
  const auto game = ergo::gen_double_spend(params);
  const double ps = params.success_prob(2);
  EXPECT_NEAR(dist_mass_to(game, 2, 0, 9, 5), ps, 1e-15);
  // The disconnect mass goes to the shuffling state.
  EXPECT_NEAR(dist_mass_to(game, 2, 0, 9, 0), params.p_dc * (1.0 - ps), 1e-15);
}

TEST(DoubleSpend, ValidErgodicExactMass) {
  ergo::DoubleSpendParams params;
  params.n = 7;
  const auto game = ergo::gen_double_spend(params);
  EXPECT_TRUE(ergo::validate(game).empty());
  EXPECT_TRUE(ergo::ergodic_sufficient(game));
  expect_exact_unit_mass(game);
}

TEST(PoissonCdf, MatchesSeriesAndEdges) {
  EXPECT_NEAR(ergo::poisson_cdf(1.0, 0.4), std::exp(-1.0), 1e-15);
  EXPECT_EQ(ergo::poisson_cdf(1.0, -0.1), 0.0);
  EXPECT_EQ(ergo::poisson_cdf(0.0, 0.0), 1.0);
  // Two-term series at x >= 1.
  EXPECT_NEAR(ergo::poisson_cdf(2.0, 1.5), std::exp(-2.0) * (1.0 + 2.0), 1e-15);
  EXPECT_THROW(ergo::poisson_cdf(-1.0, 0.0), std::invalid_argument);
}

TEST(ProofOfStake, RewardCases) {
  const int n = 10;
  const double eps = 1.0 / (2 * n + 1);
  const double mining = 10.0;

  // A pool holding at least half the stake signs its own block.
  EXPECT_DOUBLE_EQ(ergo::detail::pos_pool_revenue(0.6, 0.1, false, false, 0.5, mining),
                   mining * 0.6 + 0.6 * (1.0 - 0.1));

  // Refusing to sign forfeits the rival-signing reward.
  const double refusing = ergo::detail::pos_pool_revenue(2 * eps, 3 * eps, false, false, 0.2, mining);
  const double signing = ergo::detail::pos_pool_revenue(2 * eps, 3 * eps, true, false, 0.2, mining);
  EXPECT_NEAR(signing - refusing, (3 * eps) * (2 * eps), 1e-15);

  // R3 = own * (1 - rival): i = 2, j = 3 at n = 10 gives 12/147.
  const double r3 = (2 * eps) * (1.0 - 3 * eps);
  EXPECT_NEAR(r3, 12.0 / 147.0, 1e-15);
  const double no_mining_no_sign =
      ergo::detail::pos_pool_revenue(2 * eps, 3 * eps, false, false, 0.0, 0.0);
  EXPECT_NEAR(no_mining_no_sign, r3, 1e-15);
}

TEST(ProofOfStake, AcceptanceProbabilityUsesPoissonTail) {
  const double own = 0.2, rival = 0.1, lambda = 0.6;
  // Rival refuses: the block needs independent signatures of 0.3 stake.
  EXPECT_NEAR(ergo::detail::pos_accept_prob(own, rival, false, lambda),
              1.0 - ergo::poisson_cdf(lambda, 0.5 - own), 1e-15);
  // Rival signs but they are short of a majority together.
  EXPECT_NEAR(ergo::detail::pos_accept_prob(own, rival, true, lambda),
              1.0 - ergo::poisson_cdf(lambda, 0.5 - own - rival), 1e-15);
  // Joint majority accepts outright.
  EXPECT_DOUBLE_EQ(ergo::detail::pos_accept_prob(0.3, 0.25, true, lambda), 1.0);
}

TEST(ProofOfStake, StructureAndConnectivityWalk) {
  ergo::ProofOfStakeParams params;
  params.n = 3;
  params.p_step = 0.25;  // 5 connectivity levels
  const auto game = ergo::gen_proof_of_stake(params);
  EXPECT_EQ(game.n_states(), 3 * 3 * 5);
  EXPECT_TRUE(ergo::validate(game).empty());
  EXPECT_TRUE(ergo::ergodic_sufficient(game));
  expect_exact_unit_mass(game);
  EXPECT_EQ(game.action_labels(1, 0)[0], "sign");
  EXPECT_EQ(game.action_labels(2, 0)[1], "refuse");
}

TEST(ProofOfStake, RejectsNonDividingStep) {
  ergo::ProofOfStakeParams params;
  params.n = 2;
  params.p_step = 0.3;
  EXPECT_THROW(ergo::gen_proof_of_stake(params), std::invalid_argument);
}

TEST(Rps, NoisyTransitionFromWinningState) {
  const auto game = ergo::gen_rps(0.1, false);
  // State +2 is index 4; rock beats scissors: lap win to state 0 (index 2)
  // with the base mass plus the rival's connection-loss share.
  EXPECT_NEAR(dist_mass_to(game, 4, 0, 2, 2), 0.9 + 0.05, 1e-15);
  EXPECT_NEAR(dist_mass_to(game, 4, 0, 2, 3), 0.05, 1e-15);
}

TEST(Rps, TieRewardAtWinningState) {
  const auto game = ergo::gen_rps(0.1, false);
  EXPECT_DOUBLE_EQ(game.reward(4, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(game.reward(4, 0, 2), 1.0);  // R beats S
  EXPECT_DOUBLE_EQ(game.reward(4, 2, 0), 0.0);  // S loses to R
  EXPECT_DOUBLE_EQ(game.reward(2, 0, 2), 0.0);  // no reward away from +2
}

TEST(Rps, SymmetricRewardsAreAntisymmetric) {
  const double noise = 0.2;
  const auto game = ergo::gen_rps(noise, true);
  for (int a1 = 0; a1 < 3; ++a1) {
    for (int a2 = 0; a2 < 3; ++a2) {
      for (int s = 0; s < 5; ++s) {
        const int mirrored = 4 - s;
        EXPECT_NEAR(game.reward(s, a1, a2), -game.reward(mirrored, a2, a1), 1e-15);
      }
    }
  }
}

TEST(Rps, ValidityAndErgodicity) {
  for (bool symmetric : {false, true}) {
    const auto noiseless = ergo::gen_rps(0.0, symmetric);
    EXPECT_TRUE(ergo::validate(noiseless).empty());
    EXPECT_FALSE(ergo::ergodic_sufficient(noiseless));
    const auto noisy = ergo::gen_rps(0.05, symmetric);
    EXPECT_TRUE(ergo::validate(noisy).empty());
    EXPECT_TRUE(ergo::ergodic_sufficient(noisy));
    expect_exact_unit_mass(noisy);
  }
}
