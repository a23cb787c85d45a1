#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nashvi/game.hpp"
#include "nashvi/matrix_equilibrium.hpp"
#include "nashvi/rng.hpp"

namespace nashvi {

namespace detail {

// Each row: `support` distinct next states (all states when support is 0 or
// >= S) with uniform[0,1) weights, then normalized.
inline void fill_random_transitions(Dynamics& d, CounterRng& rng, int support) {
  const int S = d.num_states;
  const int k = (support <= 0 || support >= S) ? S : support;
  std::vector<int> order(static_cast<std::size_t>(S));
  for (int h = 0; h < d.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      for (std::size_t j = 0; j < d.num_joint(); ++j) {
        auto row = d.next_dist(h, s, j);
        std::fill(row.begin(), row.end(), 0.0);
        std::iota(order.begin(), order.end(), 0);
        for (int i = 0; i < k; ++i) {
          const auto pick = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(S - i));
          std::swap(order[static_cast<std::size_t>(i)], order[pick]);
        }
        double sum = 0.0;
        for (int i = 0; i < k; ++i) {
          double w = rng.uniform();
          if (w <= 0.0) w = 0x1.0p-53;
          row[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = w;
          sum += w;
        }
        for (double& p : row) p /= sum;
      }
    }
  }
}

}  // namespace detail

inline ZeroSumGame random_zero_sum(int S, int A, int B, int H, std::uint64_t seed, int sparsity = 0,
                                   RewardKind kind = RewardKind::Deterministic) {
  if (S <= 0 || A <= 0 || B <= 0 || H <= 0) throw std::invalid_argument("random_zero_sum: sizes must be positive");
  auto g = make_zero_sum(H, S, A, B, 0);
  g.reward_kind = kind;
  CounterRng rng(seed, 0x7a65726f73756dULL);
  detail::fill_random_transitions(g.dynamics, rng, sparsity);
  for (double& r : g.reward) r = rng.uniform();
  return g;
}

// m players; with constant_sum (two players only) player 2's reward is 1 - r_1.
inline GeneralSumGame random_general_sum(int S, std::vector<int> action_counts, int H, std::uint64_t seed,
                                         bool constant_sum = false, int sparsity = 0,
                                         RewardKind kind = RewardKind::Deterministic) {
  if (S <= 0 || H <= 0) throw std::invalid_argument("random_general_sum: sizes must be positive");
  if (constant_sum && action_counts.size() != 2) throw std::invalid_argument("random_general_sum: constant-sum needs two players");
  auto g = make_general_sum(H, S, std::move(action_counts), 0);
  g.reward_kind = kind;
  CounterRng rng(seed, 0x67656e73756dULL);
  detail::fill_random_transitions(g.dynamics, rng, sparsity);
  for (auto& table : g.rewards)
    for (double& r : table) r = rng.uniform();
  if (constant_sum)
    for (std::size_t k = 0; k < g.rewards[1].size(); ++k) g.rewards[1][k] = 1.0 - g.rewards[0][k];
  return g;
}

// Uniform[0,1) reward table with the shape of `d` (one reward-free task).
inline std::vector<double> random_reward_table(const Dynamics& d, std::uint64_t seed) {
  CounterRng rng(seed, 0x7461736bULL);
  std::vector<double> r(d.num_sa());
  for (double& x : r) x = rng.uniform();
  return r;
}

// Bernoulli-mean matrix 1/2 + (1 - 2 * [a != a* and b == b*]) eps.
inline Matrix hard_matrix(int A, int B, int a_star, int b_star, double eps) {
  if (A <= 0 || B <= 0) throw std::invalid_argument("hard_matrix: sizes must be positive");
  if (a_star < 0 || a_star >= A || b_star < 0 || b_star >= B) throw std::invalid_argument("hard_matrix: planted action out of range");
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("hard_matrix: eps must be in (0, 1/2]");
  Matrix M(A, B);
  for (int a = 0; a < A; ++a)
    for (int b = 0; b < B; ++b) M(a, b) = 0.5 + ((a != a_star && b == b_star) ? -eps : eps);
  return M;
}

// Hard Markov game: S + 1 states (state 0 is the fixed start s_0), total
// horizon H + 1. Step 0 has no reward; every step moves to one of states
// 1..S uniformly at random regardless of the action. At step h >= 1 in
// state i the reward is Bernoulli with mean hard_matrix(eps / H) planted at
// (a_star[h - 1][i - 1], b_star[h - 1][i - 1]).
inline ZeroSumGame hard_markov_game(int S, int A, int B, int H, const std::vector<std::vector<int>>& a_star,
                                    const std::vector<std::vector<int>>& b_star, double eps) {
  if (S <= 0 || A <= 0 || B <= 0 || H <= 0) throw std::invalid_argument("hard_markov_game: sizes must be positive");
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("hard_markov_game: eps must be in (0, 1/2]");
  if (a_star.size() != static_cast<std::size_t>(H) || b_star.size() != static_cast<std::size_t>(H)) {
    throw std::invalid_argument("hard_markov_game: planted tables must have H rows");
  }
  for (int h = 0; h < H; ++h) {
    if (a_star[static_cast<std::size_t>(h)].size() != static_cast<std::size_t>(S) ||
        b_star[static_cast<std::size_t>(h)].size() != static_cast<std::size_t>(S)) {
      throw std::invalid_argument("hard_markov_game: planted tables must have S columns");
    }
  }
  auto g = make_zero_sum(H + 1, S + 1, A, B, 0);
  g.reward_kind = RewardKind::Bernoulli;
  auto& d = g.dynamics;
  for (int h = 0; h <= H; ++h) {
    for (int s = 0; s <= S; ++s) {
      for (std::size_t j = 0; j < d.num_joint(); ++j) {
        auto row = d.next_dist(h, s, j);
        row[0] = 0.0;
        for (int k = 1; k <= S; ++k) row[static_cast<std::size_t>(k)] = 1.0 / S;
      }
      if (h == 0 || s == 0) continue;  // rewardless start step; state 0 unreachable later
      const auto M = hard_matrix(A, B, a_star[static_cast<std::size_t>(h - 1)][static_cast<std::size_t>(s - 1)],
                                 b_star[static_cast<std::size_t>(h - 1)][static_cast<std::size_t>(s - 1)], eps / H);
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b) g.reward[d.sa_index(h, s, static_cast<std::size_t>(a * B + b))] = M(a, b);
    }
  }
  return g;
}

// Planted tables drawn uniformly at random.
inline ZeroSumGame random_hard_markov_game(int S, int A, int B, int H, double eps, std::uint64_t seed) {
  CounterRng rng(seed, 0x68617264ULL);
  std::vector<std::vector<int>> as(static_cast<std::size_t>(H), std::vector<int>(static_cast<std::size_t>(S)));
  auto bs = as;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      as[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(A)));
      bs[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(B)));
    }
  }
  return hard_markov_game(S, A, B, H, as, bs, eps);
}

}  // namespace nashvi
