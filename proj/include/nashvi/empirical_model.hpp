#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nashvi/game.hpp"
#include "nashvi/simulator.hpp"

namespace nashvi {

// Visit counts and the empirical transition estimate of a tabular game.
// Unvisited entries hold the uniform distribution. Rewards observed on
// visits are accumulated separately so a learner never reads the game's
// reward tables.
class EmpiricalModel {
 public:
  EmpiricalModel() = default;
  explicit EmpiricalModel(const Dynamics& shape, int num_reward_players = 0) : estimate_(shape) {
    const auto S = static_cast<std::size_t>(shape.num_states);
    counts_.assign(shape.num_sa(), 0);
    next_counts_.assign(shape.num_sa() * S, 0);
    std::fill(estimate_.transition.begin(), estimate_.transition.end(), 1.0 / static_cast<double>(S));
    reward_sums_.assign(static_cast<std::size_t>(num_reward_players), std::vector<double>(shape.num_sa(), 0.0));
  }

  // P-hat as a Dynamics value (same horizon, states, actions, initial state).
  [[nodiscard]] const Dynamics& estimate() const { return estimate_; }
  [[nodiscard]] std::int64_t count(std::size_t sa) const { return counts_[sa]; }
  [[nodiscard]] std::int64_t next_count(std::size_t sa, int s_next) const {
    return next_counts_[sa * static_cast<std::size_t>(estimate_.num_states) + static_cast<std::size_t>(s_next)];
  }
  [[nodiscard]] std::span<const double> phat(std::size_t sa) const {
    const auto S = static_cast<std::size_t>(estimate_.num_states);
    return {estimate_.transition.data() + sa * S, S};
  }

  // Mean observed reward of `player` at sa; 0 when unvisited.
  [[nodiscard]] double mean_reward(int player, std::size_t sa) const {
    return counts_[sa] > 0 ? reward_sums_[static_cast<std::size_t>(player)][sa] / static_cast<double>(counts_[sa]) : 0.0;
  }
  [[nodiscard]] std::vector<double> mean_rewards(int player) const {
    std::vector<double> out(counts_.size());
    for (std::size_t sa = 0; sa < out.size(); ++sa) out[sa] = mean_reward(player, sa);
    return out;
  }

  void observe(int h, const Step& step) {
    const std::size_t sa = estimate_.sa_index(h, step.state, step.joint_action);
    const auto S = static_cast<std::size_t>(estimate_.num_states);
    ++counts_[sa];
    ++next_counts_[sa * S + static_cast<std::size_t>(step.next_state)];
    for (std::size_t i = 0; i < reward_sums_.size() && i < step.rewards.size(); ++i) reward_sums_[i][sa] += step.rewards[i];
    const double inv = 1.0 / static_cast<double>(counts_[sa]);
    for (std::size_t k = 0; k < S; ++k) estimate_.transition[sa * S + k] = static_cast<double>(next_counts_[sa * S + k]) * inv;
  }

  void observe(const Trajectory& traj) {
    for (std::size_t h = 0; h < traj.steps.size(); ++h) observe(static_cast<int>(h), traj.steps[h]);
  }

 private:
  Dynamics estimate_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> next_counts_;
  std::vector<std::vector<double>> reward_sums_;
};

}  // namespace nashvi
