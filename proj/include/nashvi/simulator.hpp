#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nashvi/game.hpp"
#include "nashvi/policy.hpp"
#include "nashvi/rng.hpp"

namespace nashvi {

struct Step {
  int state = 0;
  std::size_t joint_action = 0;
  std::vector<double> rewards;  // one per player; zero-sum games record the max-player only
  int next_state = 0;
};

struct Trajectory {
  std::vector<Step> steps;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Episode stream used for episode k of a run seeded with `seed`.
inline CounterRng episode_rng(std::uint64_t seed, std::uint64_t episode) {
  return CounterRng(seed).split(episode);
}

namespace detail {

template <typename RewardFn>
Trajectory rollout(const Dynamics& d, const CorrelatedPolicy& pi, CounterRng rng, RewardFn&& realize) {
  if (!matches(pi, d)) throw std::invalid_argument("sample_episode: policy dimensions do not match game");
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(d.horizon));
  int s = d.initial_state;
  for (int h = 0; h < d.horizon; ++h) {
    Step step;
    step.state = s;
    step.joint_action = rng.categorical(pi.at(h, s));
    step.rewards = realize(h, s, step.joint_action, rng);
    step.next_state = static_cast<int>(rng.categorical(d.next_dist(h, s, step.joint_action)));
    s = step.next_state;
    traj.steps.push_back(std::move(step));
  }
  return traj;
}

inline double realize(RewardKind kind, double mean, CounterRng& rng) {
  if (kind == RewardKind::Deterministic) return mean;
  return rng.bernoulli(mean) ? 1.0 : 0.0;
}

}  // namespace detail

inline Trajectory sample_episode(const ZeroSumGame& g, const CorrelatedPolicy& pi, CounterRng rng) {
  auto traj = detail::rollout(g.dynamics, pi, rng, [&](int h, int s, std::size_t j, CounterRng& r) {
    return std::vector<double>{detail::realize(g.reward_kind, g.reward[g.dynamics.sa_index(h, s, j)], r)};
  });
  return traj;
}

inline Trajectory sample_episode(const GeneralSumGame& g, const CorrelatedPolicy& pi, CounterRng rng) {
  return detail::rollout(g.dynamics, pi, rng, [&](int h, int s, std::size_t j, CounterRng& r) {
    std::vector<double> out;
    out.reserve(g.rewards.size());
    for (const auto& table : g.rewards) out.push_back(detail::realize(g.reward_kind, table[g.dynamics.sa_index(h, s, j)], r));
    return out;
  });
}

// Reward-free rollout; the dynamics carry no reward information at all.
inline Trajectory sample_transitions(const Dynamics& d, const CorrelatedPolicy& pi, CounterRng rng) {
  return detail::rollout(d, pi, rng, [](int, int, std::size_t, CounterRng&) { return std::vector<double>{}; });
}

template <typename Game>
Trajectory sample_episode(const Game& g, const CorrelatedPolicy& pi, std::uint64_t seed, std::uint64_t episode = 0) {
  auto traj = sample_episode(g, pi, episode_rng(seed, episode));
  traj.seed = seed;
  traj.stream = episode;
  return traj;
}

}  // namespace nashvi
