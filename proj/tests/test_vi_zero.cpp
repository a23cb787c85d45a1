#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "nashvi/evaluation.hpp"
#include "nashvi/instances.hpp"
#include "nashvi/multi_nash_vi.hpp"
#include "nashvi/vi_zero.hpp"
#include "oracles.hpp"

using namespace nashvi;

TEST(Explore, SingleEpisodeLeavesUniformModel) {
  const auto g = random_zero_sum(3, 2, 2, 3, 1);
  const auto r = explore(g.dynamics, 1, ExplorationConfig{}, 1);
  ASSERT_EQ(r.log.episodes.size(), 1u);
  EXPECT_DOUBLE_EQ(r.log.episodes[0].optimistic_gap, 3.0);
  EXPECT_EQ(r.log.output_episode, 1);
  for (double p : r.p_out.transition) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
  EXPECT_EQ(r.transitions.size(), 3u);
}

TEST(Explore, MultiplayerSingleEpisodeLeavesUniformModel) {
  const auto g = random_general_sum(2, {2, 2, 2}, 2, 1);
  const auto r = multi_explore(g.dynamics, 1, ExplorationConfig{}, 1);
  EXPECT_DOUBLE_EQ(r.log.episodes[0].optimistic_gap, 2.0);
  for (double p : r.p_out.transition) EXPECT_DOUBLE_EQ(p, 0.5);
}

TEST(Explore, RecordsEveryTransitionAndIsDeterministic) {
  const auto g = random_zero_sum(3, 2, 2, 3, 2);
  const auto a = explore(g.dynamics, 50, ExplorationConfig{}, 9);
  const auto b = explore(g.dynamics, 50, ExplorationConfig{}, 9);
  EXPECT_EQ(a.transitions.size(), 150u);
  EXPECT_EQ(a.p_out, b.p_out);
  for (std::size_t k = 0; k < a.transitions.size(); ++k) {
    EXPECT_EQ(a.transitions[k].joint, b.transitions[k].joint);
    EXPECT_EQ(a.transitions[k].s_next, b.transitions[k].s_next);
    EXPECT_EQ(a.transitions[k].episode, static_cast<int>(k / 3) + 1);
    EXPECT_EQ(a.transitions[k].h, static_cast<int>(k % 3));
  }
  // episodes chain: next state of step h is the state of step h + 1
  for (std::size_t k = 0; k + 1 < a.transitions.size(); ++k)
    if (a.transitions[k].episode == a.transitions[k + 1].episode) {
      EXPECT_EQ(a.transitions[k].s_next, a.transitions[k + 1].s);
    }
}

TEST(Explore, GreedyPolicyVisitsUnseenEntriesFirst) {
  // with a tiny bonus the uncertainty is driven by unvisited entries (value H)
  auto d = make_dynamics(1, 1, {2, 3});
  for (auto& p : d.transition) p = 1.0;
  ExplorationConfig cfg;
  cfg.iota = 1e-6;
  const auto r = explore(d, 6, cfg, 1);
  std::vector<int> seen(6, 0);
  for (const auto& t : r.transitions) ++seen[t.joint];
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(Explore, ModelMatchesTransitionCounts) {
  const auto g = random_zero_sum(2, 2, 2, 2, 3);
  ExplorationConfig cfg;
  cfg.iota = 1e-3;  // bonus small enough that gaps fall and p_out tracks the data
  const auto r = explore(g.dynamics, 200, cfg, 4);
  ASSERT_GT(r.log.output_episode, 1);
  // rebuild the estimate from the records of episodes before the output episode
  const auto& d = g.dynamics;
  std::vector<double> cnt(d.num_sa() * 2, 0.0);
  for (const auto& t : r.transitions)
    if (t.episode < r.log.output_episode) cnt[d.sa_index(t.h, t.s, t.joint) * 2 + static_cast<std::size_t>(t.s_next)] += 1.0;
  for (std::size_t sa = 0; sa < d.num_sa(); ++sa) {
    const double n = cnt[sa * 2] + cnt[sa * 2 + 1];
    for (std::size_t k = 0; k < 2; ++k) EXPECT_DOUBLE_EQ(r.p_out.transition[sa * 2 + k], n > 0 ? cnt[sa * 2 + k] / n : 0.5);
  }
}

TEST(Explore, BonusFormulas) {
  ExplorationConfig two;
  EXPECT_DOUBLE_EQ(exploration_bonus(two, 1, 2, 3, 1), hoeffding_bonus(1, 2, 3, 1, 1));
  ExplorationConfig sq;
  sq.bonus = ExplorationBonus::SqrtS;
  sq.c = 2;
  EXPECT_DOUBLE_EQ(exploration_bonus(sq, 4, 2, 3, 1), 2 * std::sqrt(3.0 * 4 * 1 / 4));
}

TEST(Explore, RejectsBadInput) {
  const auto g = random_zero_sum(2, 2, 2, 2, 3);
  EXPECT_THROW(explore(g.dynamics, 0, ExplorationConfig{}, 1), std::invalid_argument);
  ExplorationConfig c;
  c.c = 0;
  EXPECT_THROW(explore(g.dynamics, 1, c, 1), std::invalid_argument);
  auto bad = g.dynamics;
  bad.transition[0] = 0.3;
  EXPECT_THROW(explore(bad, 1, ExplorationConfig{}, 1), std::invalid_argument);
}

TEST(RewardData, DeterministicRewardsAreRecoveredExactly) {
  const auto g = random_zero_sum(2, 2, 2, 2, 5);
  const auto ex = explore(g.dynamics, 40, ExplorationConfig{}, 2);
  const auto data = augment_with_rewards(g.dynamics, ex.transitions, g.reward, RewardKind::Deterministic, 2, 7);
  EXPECT_EQ(data.records.size(), 2 * ex.transitions.size());
  const auto r = estimate_reward(data, g.dynamics);
  std::vector<bool> visited(g.dynamics.num_sa(), false);
  for (const auto& t : ex.transitions) visited[g.dynamics.sa_index(t.h, t.s, t.joint)] = true;
  for (std::size_t sa = 0; sa < r.size(); ++sa) EXPECT_EQ(r[sa], visited[sa] ? g.reward[sa] : 0.0);
}

TEST(RewardData, EmptyAndTwoPointMean) {
  const auto d = make_dynamics(1, 1, {2, 2});
  RewardDataset data;
  for (double x : estimate_reward(data, d)) EXPECT_EQ(x, 0.0);
  data.records.push_back({1, 0, 0, {1, 0}, 0, 0.0});
  data.records.push_back({2, 0, 0, {1, 0}, 0, 1.0});
  EXPECT_DOUBLE_EQ(estimate_reward(data, d)[2], 0.5);
  data.records.push_back({2, 0, 0, {2, 0}, 0, 1.0});
  EXPECT_THROW(estimate_reward(data, d), std::invalid_argument);
}

TEST(RewardData, BernoulliRealizationsAreBinaryAndSeeded) {
  const auto g = random_zero_sum(2, 2, 2, 2, 6);
  const auto ex = explore(g.dynamics, 20, ExplorationConfig{}, 2);
  const auto a = augment_with_rewards(g.dynamics, ex.transitions, g.reward, RewardKind::Bernoulli, 1, 3);
  const auto b = augment_with_rewards(g.dynamics, ex.transitions, g.reward, RewardKind::Bernoulli, 1, 3);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_TRUE(a.records[k].reward == 0.0 || a.records[k].reward == 1.0);
    EXPECT_EQ(a.records[k].reward, b.records[k].reward);
  }
}

TEST(RewardData, TextRoundTrip) {
  RewardDataset data;
  data.records.push_back({1, 0, 2, {1, 0, 1}, 1, 0.1});
  data.records.push_back({3, 1, 0, {0, 0, 0}, 2, 1.0 / 3.0});
  std::stringstream ss;
  write_dataset(ss, data, 3);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "# episode,h,s,a1,a2,a3,s_next,reward");
  const auto back = read_dataset(ss, 3);
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_EQ(back.records[1].actions, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(back.records[1].reward, 1.0 / 3.0);
  EXPECT_EQ(back.records[0].s_next, 1);
  std::stringstream bad("1,0,0,1\n");
  EXPECT_THROW(read_dataset(bad, 2), std::exception);
}

TEST(PlanNash, OnTrueModelIsNearlyExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_zero_sum(3, 2, 3, 3, seed);
    const auto plan = plan_nash(g.dynamics, g.reward);
    EXPECT_LE(nash_gap(g, plan.mu, plan.nu), 3 * 2 * 3 * kDefaultSolverTol);
  }
}

TEST(PlanNash, ZeroRewardsAndSingleStep) {
  const auto g = random_zero_sum(2, 2, 2, 2, 1);
  const auto z = plan_nash(g.dynamics, std::vector<double>(g.dynamics.num_sa(), 0.0));
  for (double v : z.values.V) EXPECT_EQ(v, 0.0);
  auto one = make_zero_sum(1, 1, 2, 3);
  for (auto& p : one.dynamics.transition) p = 1.0;
  one.reward = {0.1, 0.8, 0.4, 0.7, 0.2, 0.5};
  const auto plan = plan_nash(one.dynamics, one.reward);
  const auto sol = solve_zero_sum_nash(Matrix(2, 3, one.reward));
  EXPECT_NEAR(plan.values.v(0, 0), sol.value, 1e-9);
}

TEST(PlanEquilibrium, ZeroSumCceMatchesNashValue) {
  const auto g = random_zero_sum(2, 2, 2, 2, 3);
  const auto gs = to_general_sum(g);
  const auto plan = plan_equilibrium_general(gs.dynamics, gs.rewards, EquilibriumKind::CCE);
  const auto nash = plan_nash(g.dynamics, g.reward);
  EXPECT_NEAR(plan.values[0].v(0, 0), nash.values.v(0, 0), 1e-7);
}

TEST(PlanEquilibrium, ZeroRewardsGiveUniform) {
  const auto g = random_general_sum(2, {2, 2, 2}, 2, 3);
  const std::vector<std::vector<double>> zero(3, std::vector<double>(g.dynamics.num_sa(), 0.0));
  const auto plan = plan_equilibrium_general(g.dynamics, zero, EquilibriumKind::CE);
  EXPECT_EQ(plan.policy, uniform_policy(g.dynamics));
}

TEST(PlanEquilibrium, ThreePlayerCeHasSmallCeGap) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = random_general_sum(2, {2, 2, 2}, 2, seed);
    const auto plan = plan_equilibrium_general(g.dynamics, g.rewards, EquilibriumKind::CE);
    EXPECT_LE(ce_gap(g, plan.policy).gap, 1e-6);
    // the CE policy is also a CCE
    EXPECT_LE(cce_gap(g, plan.policy), 1e-6);
    // cross-check the per-player gap with exhaustive enumeration on one player
    EXPECT_LE(oracle::brute_cce_gap_player(g, plan.policy, 0), 1e-6);
  }
}
