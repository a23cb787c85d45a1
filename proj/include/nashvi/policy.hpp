#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "nashvi/game.hpp"

namespace nashvi {

// Per-(h, s) distribution over one player's actions.
struct MarkovPolicy {
  int player = 0;
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> probs;  // [(h * S + s) * A + a]

  MarkovPolicy() = default;
  MarkovPolicy(int player_, int horizon_, int num_states_, int num_actions_)
      : player(player_), horizon(horizon_), num_states(num_states_), num_actions(num_actions_),
        probs(static_cast<std::size_t>(horizon_ * num_states_ * num_actions_), 1.0 / num_actions_) {}

  [[nodiscard]] std::span<const double> at(int h, int s) const {
    return {probs.data() + static_cast<std::size_t>((h * num_states + s) * num_actions),
            static_cast<std::size_t>(num_actions)};
  }
  [[nodiscard]] std::span<double> at(int h, int s) {
    return {probs.data() + static_cast<std::size_t>((h * num_states + s) * num_actions),
            static_cast<std::size_t>(num_actions)};
  }

  friend bool operator==(const MarkovPolicy&, const MarkovPolicy&) = default;
};

// Per-(h, s) distribution over the joint action space.
struct CorrelatedPolicy {
  int horizon = 0;
  int num_states = 0;
  JointActionSpace actions;
  std::vector<double> probs;  // [(h * S + s) * J + j]

  CorrelatedPolicy() = default;
  CorrelatedPolicy(int horizon_, int num_states_, JointActionSpace actions_)
      : horizon(horizon_), num_states(num_states_), actions(std::move(actions_)),
        probs(static_cast<std::size_t>(horizon_ * num_states_) * actions.size(),
              1.0 / static_cast<double>(actions.size())) {}

  [[nodiscard]] std::size_t num_joint() const { return actions.size(); }
  [[nodiscard]] std::span<const double> at(int h, int s) const {
    return {probs.data() + static_cast<std::size_t>(h * num_states + s) * num_joint(), num_joint()};
  }
  [[nodiscard]] std::span<double> at(int h, int s) {
    return {probs.data() + static_cast<std::size_t>(h * num_states + s) * num_joint(), num_joint()};
  }

  friend bool operator==(const CorrelatedPolicy&, const CorrelatedPolicy&) = default;
};

inline CorrelatedPolicy uniform_policy(const Dynamics& d) {
  return CorrelatedPolicy(d.horizon, d.num_states, d.actions);
}

inline bool is_distribution(std::span<const double> p, double tol = kNormalizationTol) {
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

inline bool is_valid(const MarkovPolicy& pi, double tol = kNormalizationTol) {
  if (pi.probs.size() != static_cast<std::size_t>(pi.horizon * pi.num_states * pi.num_actions)) return false;
  for (int h = 0; h < pi.horizon; ++h)
    for (int s = 0; s < pi.num_states; ++s)
      if (!is_distribution(pi.at(h, s), tol)) return false;
  return true;
}

inline bool is_valid(const CorrelatedPolicy& pi, double tol = kNormalizationTol) {
  if (pi.probs.size() != static_cast<std::size_t>(pi.horizon * pi.num_states) * pi.num_joint()) return false;
  for (int h = 0; h < pi.horizon; ++h)
    for (int s = 0; s < pi.num_states; ++s)
      if (!is_distribution(pi.at(h, s), tol)) return false;
  return true;
}

inline bool matches(const CorrelatedPolicy& pi, const Dynamics& d) {
  return pi.horizon == d.horizon && pi.num_states == d.num_states && pi.actions == d.actions &&
         pi.probs.size() == static_cast<std::size_t>(d.horizon * d.num_states) * d.num_joint();
}

// [D_pi Q](s) for a single (h, s): expectation of Q under the joint distribution.
inline double policy_expectation(std::span<const double> Q, std::span<const double> dist) {
  if (Q.size() != dist.size()) throw std::invalid_argument("policy_expectation: dimension mismatch");
  return std::inner_product(Q.begin(), Q.end(), dist.begin(), 0.0);
}

// Marginal of one joint distribution for a single player.
inline std::vector<double> marginal(const JointActionSpace& space, std::span<const double> joint, int player) {
  std::vector<double> out(static_cast<std::size_t>(space.count(player)), 0.0);
  for (std::size_t j = 0; j < joint.size(); ++j) out[static_cast<std::size_t>(space.action_of(j, player))] += joint[j];
  return out;
}

// Distribution of the other players' joint action (mixed-radix over the
// remaining players, in their original order).
inline std::vector<double> marginal_others(const JointActionSpace& space, std::span<const double> joint, int player) {
  const std::size_t stride = space.stride(player);
  const auto n = static_cast<std::size_t>(space.count(player));
  std::vector<double> out(space.size() / n, 0.0);
  for (std::size_t j = 0; j < joint.size(); ++j) {
    const std::size_t hi = j / (stride * n);
    const std::size_t lo = j % stride;
    out[hi * stride + lo] += joint[j];
  }
  return out;
}

inline MarkovPolicy marginalize(const CorrelatedPolicy& pi, int player) {
  MarkovPolicy out(player, pi.horizon, pi.num_states, pi.actions.count(player));
  for (int h = 0; h < pi.horizon; ++h) {
    for (int s = 0; s < pi.num_states; ++s) {
      const auto m = marginal(pi.actions, pi.at(h, s), player);
      std::copy(m.begin(), m.end(), out.at(h, s).begin());
    }
  }
  return out;
}

// Product of independent per-player policies.
inline CorrelatedPolicy product_policy(std::span<const MarkovPolicy> factors) {
  if (factors.empty()) throw std::invalid_argument("product_policy: no factors");
  std::vector<int> counts;
  for (const auto& f : factors) counts.push_back(f.num_actions);
  CorrelatedPolicy out(factors[0].horizon, factors[0].num_states, JointActionSpace(counts));
  for (int h = 0; h < out.horizon; ++h) {
    for (int s = 0; s < out.num_states; ++s) {
      auto dst = out.at(h, s);
      for (std::size_t j = 0; j < dst.size(); ++j) {
        double p = 1.0;
        for (std::size_t i = 0; i < factors.size(); ++i) {
          p *= factors[i].at(h, s)[static_cast<std::size_t>(out.actions.action_of(j, static_cast<int>(i)))];
        }
        dst[j] = p;
      }
    }
  }
  return out;
}

inline CorrelatedPolicy product_policy(const MarkovPolicy& mu, const MarkovPolicy& nu) {
  const MarkovPolicy f[] = {mu, nu};
  return product_policy(std::span<const MarkovPolicy>(f));
}

}  // namespace nashvi
