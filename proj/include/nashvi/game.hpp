#pragma once

// Tabular episodic Markov games.
//
// Layout: every table is a dense row-major array, step-major, then state,
// then joint action (then next state for transitions). Joint actions use a
// mixed-radix encoding in which player 0 is the most significant digit, so
// for two players (a, b) maps to a * B + b. All indices are 0-based in
// code and in files; documentation counts steps and states from 1.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nashvi {

enum class RewardKind { Deterministic, Bernoulli };

inline constexpr double kNormalizationTol = 1e-12;

// Mixed-radix joint action index space.
class JointActionSpace {
 public:
  JointActionSpace() = default;
  explicit JointActionSpace(std::vector<int> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw std::invalid_argument("joint action space needs at least one player");
    size_ = 1;
    for (int c : counts_) {
      if (c <= 0) throw std::invalid_argument("action counts must be positive");
      size_ *= static_cast<std::size_t>(c);
    }
  }

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] int num_players() const { return static_cast<int>(counts_.size()); }
  [[nodiscard]] int count(int player) const { return counts_[static_cast<std::size_t>(player)]; }
  [[nodiscard]] const std::vector<int>& counts() const { return counts_; }

  [[nodiscard]] std::size_t encode(std::span<const int> actions) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      idx = idx * static_cast<std::size_t>(counts_[i]) + static_cast<std::size_t>(actions[i]);
    }
    return idx;
  }

  [[nodiscard]] std::vector<int> decode(std::size_t joint) const {
    std::vector<int> actions(counts_.size());
    for (std::size_t i = counts_.size(); i-- > 0;) {
      actions[i] = static_cast<int>(joint % static_cast<std::size_t>(counts_[i]));
      joint /= static_cast<std::size_t>(counts_[i]);
    }
    return actions;
  }

  // Action of `player` inside joint index `joint`.
  [[nodiscard]] int action_of(std::size_t joint, int player) const {
    return static_cast<int>((joint / stride(player)) % static_cast<std::size_t>(count(player)));
  }

  // Joint index obtained by replacing player's action with `action`.
  [[nodiscard]] std::size_t with_action(std::size_t joint, int player, int action) const {
    const std::size_t st = stride(player);
    const auto cur = static_cast<std::size_t>(action_of(joint, player));
    return joint - cur * st + static_cast<std::size_t>(action) * st;
  }

  // Joint index built from one player's action and an index into the
  // other players' joint space (see marginal_others).
  [[nodiscard]] std::size_t join(int player, int action, std::size_t others) const {
    const std::size_t st = stride(player);
    const auto n = static_cast<std::size_t>(count(player));
    return (others / st) * st * n + static_cast<std::size_t>(action) * st + others % st;
  }

  [[nodiscard]] std::size_t stride(int player) const {
    std::size_t st = 1;
    for (std::size_t i = static_cast<std::size_t>(player) + 1; i < counts_.size(); ++i) {
      st *= static_cast<std::size_t>(counts_[i]);
    }
    return st;
  }

  friend bool operator==(const JointActionSpace&, const JointActionSpace&) = default;

 private:
  std::vector<int> counts_;
  std::size_t size_ = 0;
};

// Reward-free part of a game: horizon, states, actions and transitions.
struct Dynamics {
  int horizon = 0;
  int num_states = 0;
  JointActionSpace actions;
  int initial_state = 0;
  // transition[((h * S + s) * J + j) * S + s']
  std::vector<double> transition;

  [[nodiscard]] std::size_t num_joint() const { return actions.size(); }
  [[nodiscard]] std::size_t sa_index(int h, int s, std::size_t j) const {
    return (static_cast<std::size_t>(h) * static_cast<std::size_t>(num_states) +
            static_cast<std::size_t>(s)) * num_joint() + j;
  }
  [[nodiscard]] std::size_t num_sa() const {
    return static_cast<std::size_t>(horizon) * static_cast<std::size_t>(num_states) * num_joint();
  }
  [[nodiscard]] std::span<const double> next_dist(int h, int s, std::size_t j) const {
    const auto S = static_cast<std::size_t>(num_states);
    return {transition.data() + sa_index(h, s, j) * S, S};
  }
  [[nodiscard]] std::span<double> next_dist(int h, int s, std::size_t j) {
    const auto S = static_cast<std::size_t>(num_states);
    return {transition.data() + sa_index(h, s, j) * S, S};
  }

  friend bool operator==(const Dynamics&, const Dynamics&) = default;
};

inline Dynamics make_dynamics(int horizon, int num_states, std::vector<int> action_counts,
                              int initial_state = 0) {
  if (horizon <= 0 || num_states <= 0) throw std::invalid_argument("horizon and num_states must be positive");
  Dynamics d;
  d.horizon = horizon;
  d.num_states = num_states;
  d.actions = JointActionSpace(std::move(action_counts));
  d.initial_state = initial_state;
  d.transition.assign(d.num_sa() * static_cast<std::size_t>(num_states), 0.0);
  return d;
}

// Two-player zero-sum game. `reward` is the max-player's mean reward.
struct ZeroSumGame {
  Dynamics dynamics;
  std::vector<double> reward;  // indexed by dynamics.sa_index
  RewardKind reward_kind = RewardKind::Deterministic;

  [[nodiscard]] int horizon() const { return dynamics.horizon; }
  [[nodiscard]] int num_states() const { return dynamics.num_states; }
  [[nodiscard]] int num_max_actions() const { return dynamics.actions.count(0); }
  [[nodiscard]] int num_min_actions() const { return dynamics.actions.count(1); }
  [[nodiscard]] int initial_state() const { return dynamics.initial_state; }
  [[nodiscard]] double r(int h, int s, int a, int b) const {
    return reward[dynamics.sa_index(h, s, static_cast<std::size_t>(a * num_min_actions() + b))];
  }
  [[nodiscard]] std::span<const double> P(int h, int s, int a, int b) const {
    return dynamics.next_dist(h, s, static_cast<std::size_t>(a * num_min_actions() + b));
  }

  friend bool operator==(const ZeroSumGame&, const ZeroSumGame&) = default;
};

inline ZeroSumGame make_zero_sum(int horizon, int num_states, int num_max_actions, int num_min_actions,
                                 int initial_state = 0) {
  ZeroSumGame g;
  g.dynamics = make_dynamics(horizon, num_states, {num_max_actions, num_min_actions}, initial_state);
  g.reward.assign(g.dynamics.num_sa(), 0.0);
  return g;
}

// m-player general-sum game; rewards[i] is player i's mean reward table.
struct GeneralSumGame {
  Dynamics dynamics;
  std::vector<std::vector<double>> rewards;
  RewardKind reward_kind = RewardKind::Deterministic;

  [[nodiscard]] int horizon() const { return dynamics.horizon; }
  [[nodiscard]] int num_states() const { return dynamics.num_states; }
  [[nodiscard]] int num_players() const { return dynamics.actions.num_players(); }
  [[nodiscard]] int initial_state() const { return dynamics.initial_state; }
  [[nodiscard]] const JointActionSpace& actions() const { return dynamics.actions; }
  [[nodiscard]] double r(int player, int h, int s, std::size_t joint) const {
    return rewards[static_cast<std::size_t>(player)][dynamics.sa_index(h, s, joint)];
  }

  friend bool operator==(const GeneralSumGame&, const GeneralSumGame&) = default;
};

inline GeneralSumGame make_general_sum(int horizon, int num_states, std::vector<int> action_counts,
                                       int initial_state = 0) {
  GeneralSumGame g;
  g.dynamics = make_dynamics(horizon, num_states, std::move(action_counts), initial_state);
  g.rewards.assign(static_cast<std::size_t>(g.dynamics.actions.num_players()),
                   std::vector<double>(g.dynamics.num_sa(), 0.0));
  return g;
}

// Constant-sum embedding: player 1 receives r, player 2 receives 1 - r.
// Deviation gains of player 2 equal those of the min-player in the
// original game.
inline GeneralSumGame to_general_sum(const ZeroSumGame& g) {
  GeneralSumGame out;
  out.dynamics = g.dynamics;
  out.reward_kind = g.reward_kind;
  out.rewards.push_back(g.reward);
  std::vector<double> other(g.reward.size());
  for (std::size_t k = 0; k < other.size(); ++k) other[k] = 1.0 - g.reward[k];
  out.rewards.push_back(std::move(other));
  return out;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string message;
  int h = -1;
  int s = -1;
  long long joint = -1;
  int player = -1;
};

namespace detail {

inline std::optional<Violation> validate_dynamics(const Dynamics& d) {
  if (d.horizon <= 0) return Violation{"horizon must be positive"};
  if (d.num_states <= 0) return Violation{"num_states must be positive"};
  if (d.actions.num_players() <= 0 || d.actions.size() == 0) return Violation{"empty action space"};
  if (d.initial_state < 0 || d.initial_state >= d.num_states) return Violation{"initial state out of range"};
  if (d.transition.size() != d.num_sa() * static_cast<std::size_t>(d.num_states)) {
    return Violation{"transition table has wrong size"};
  }
  for (int h = 0; h < d.horizon; ++h) {
    for (int s = 0; s < d.num_states; ++s) {
      for (std::size_t j = 0; j < d.num_joint(); ++j) {
        double sum = 0.0;
        for (double p : d.next_dist(h, s, j)) {
          if (!std::isfinite(p) || p < 0.0) {
            return Violation{"negative or non-finite transition probability", h, s, static_cast<long long>(j)};
          }
          sum += p;
        }
        if (std::abs(sum - 1.0) > kNormalizationTol) {
          return Violation{"transition row does not sum to 1", h, s, static_cast<long long>(j)};
        }
      }
    }
  }
  return std::nullopt;
}

inline std::optional<Violation> validate_reward_table(const Dynamics& d, const std::vector<double>& r, int player) {
  if (r.size() != d.num_sa()) return Violation{"reward table has wrong size", -1, -1, -1, player};
  for (int h = 0; h < d.horizon; ++h) {
    for (int s = 0; s < d.num_states; ++s) {
      for (std::size_t j = 0; j < d.num_joint(); ++j) {
        const double v = r[d.sa_index(h, s, j)];
        if (!(v >= 0.0 && v <= 1.0)) {
          return Violation{"reward out of [0,1]", h, s, static_cast<long long>(j), player};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

// First invariant violation, or nullopt when the game is well formed.
inline std::optional<Violation> validate(const ZeroSumGame& g) {
  if (g.dynamics.actions.num_players() != 2) return Violation{"zero-sum game needs exactly two players"};
  if (auto v = detail::validate_dynamics(g.dynamics)) return v;
  return detail::validate_reward_table(g.dynamics, g.reward, 0);
}

inline std::optional<Violation> validate(const GeneralSumGame& g) {
  if (auto v = detail::validate_dynamics(g.dynamics)) return v;
  if (g.rewards.size() != static_cast<std::size_t>(g.num_players())) {
    return Violation{"one reward table per player required"};
  }
  for (int i = 0; i < g.num_players(); ++i) {
    if (auto v = detail::validate_reward_table(g.dynamics, g.rewards[static_cast<std::size_t>(i)], i)) return v;
  }
  return std::nullopt;
}

inline std::string describe(const Violation& v) {
  std::string out = v.message;
  if (v.h >= 0) {
    out += " at (h=" + std::to_string(v.h) + ", s=" + std::to_string(v.s) + ", joint=" + std::to_string(v.joint);
    if (v.player >= 0) out += ", player=" + std::to_string(v.player);
    out += ")";
  } else if (v.player >= 0) {
    out += " (player " + std::to_string(v.player) + ")";
  }
  return out;
}

template <typename Game>
void require_valid(const Game& g) {
  if (auto v = validate(g)) throw std::invalid_argument("invalid game: " + describe(*v));
}

// [P_h V](s, j) for every state and joint action at step h, laid out s-major.
inline std::vector<double> transition_apply(const Dynamics& d, int h, std::span<const double> V) {
  if (V.size() != static_cast<std::size_t>(d.num_states)) throw std::invalid_argument("value vector has wrong length");
  std::vector<double> out(static_cast<std::size_t>(d.num_states) * d.num_joint());
  for (int s = 0; s < d.num_states; ++s) {
    for (std::size_t j = 0; j < d.num_joint(); ++j) {
      const auto p = d.next_dist(h, s, j);
      out[static_cast<std::size_t>(s) * d.num_joint() + j] = std::inner_product(p.begin(), p.end(), V.begin(), 0.0);
    }
  }
  return out;
}

}  // namespace nashvi
