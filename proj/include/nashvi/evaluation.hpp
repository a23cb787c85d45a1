#pragma once

// Exact dynamic-programming evaluation on known models.
//
// Best responses to a correlated policy are taken against the marginal of
// the other players (the deviator does not see its recommendation). The CE
// gap instead optimizes over strategy modifications, which do condition on
// the recommendation; per (h, s) the best modification decomposes into an
// independent choice for every recommended action because the objective is
// linear in each choice.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nashvi/game.hpp"
#include "nashvi/matrix_equilibrium.hpp"
#include "nashvi/policy.hpp"

namespace nashvi {

// V has (H + 1) * S entries with V[H] = 0; Q is indexed like the game's
// reward tables.
struct ValueTable {
  int horizon = 0;
  int num_states = 0;
  std::vector<double> V;
  std::vector<double> Q;

  ValueTable() = default;
  explicit ValueTable(const Dynamics& d)
      : horizon(d.horizon), num_states(d.num_states),
        V(static_cast<std::size_t>((d.horizon + 1) * d.num_states), 0.0), Q(d.num_sa(), 0.0) {}

  [[nodiscard]] double v(int h, int s) const { return V[static_cast<std::size_t>(h * num_states + s)]; }
  double& v(int h, int s) { return V[static_cast<std::size_t>(h * num_states + s)]; }
  [[nodiscard]] std::span<const double> v_row(int h) const {
    return {V.data() + static_cast<std::size_t>(h * num_states), static_cast<std::size_t>(num_states)};
  }
};

enum class Side { Max, Min };

namespace detail {

inline double expect_next(const Dynamics& d, int h, int s, std::size_t j, const ValueTable& t) {
  const auto p = d.next_dist(h, s, j);
  const auto v = t.v_row(h + 1);
  double e = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) e += p[k] * v[k];
  return e;
}

inline void check_policy(const Dynamics& d, const CorrelatedPolicy& pi) {
  if (!matches(pi, d)) throw std::invalid_argument("policy shape does not match game");
}

}  // namespace detail

// V^pi for the max-player of a zero-sum game.
inline ValueTable policy_value(const ZeroSumGame& g, const CorrelatedPolicy& pi) {
  const auto& d = g.dynamics;
  detail::check_policy(d, pi);
  ValueTable t(d);
  for (int h = d.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < d.num_states; ++s) {
      const auto dist = pi.at(h, s);
      double v = 0.0;
      for (std::size_t j = 0; j < d.num_joint(); ++j) {
        const std::size_t sa = d.sa_index(h, s, j);
        t.Q[sa] = g.reward[sa] + detail::expect_next(d, h, s, j, t);
        v += dist[j] * t.Q[sa];
      }
      t.v(h, s) = v;
    }
  }
  return t;
}

// V^pi for every player of a general-sum game.
inline std::vector<ValueTable> policy_value(const GeneralSumGame& g, const CorrelatedPolicy& pi) {
  const auto& d = g.dynamics;
  detail::check_policy(d, pi);
  std::vector<ValueTable> out(static_cast<std::size_t>(g.num_players()), ValueTable(d));
  for (int i = 0; i < g.num_players(); ++i) {
    auto& t = out[static_cast<std::size_t>(i)];
    for (int h = d.horizon - 1; h >= 0; --h) {
      for (int s = 0; s < d.num_states; ++s) {
        const auto dist = pi.at(h, s);
        double v = 0.0;
        for (std::size_t j = 0; j < d.num_joint(); ++j) {
          const std::size_t sa = d.sa_index(h, s, j);
          t.Q[sa] = g.r(i, h, s, j) + detail::expect_next(d, h, s, j, t);
          v += dist[j] * t.Q[sa];
        }
        t.v(h, s) = v;
      }
    }
  }
  return out;
}

// Best-response value against a fixed opponent policy in a zero-sum game:
// V^{dagger, nu} when `responder` is Max (opponent = nu), V^{mu, dagger}
// when it is Min (opponent = mu). Q holds the corresponding
// Q^{dagger, nu}_h(s, a, b) or Q^{mu, dagger}_h(s, a, b).
inline ValueTable best_response_value(const ZeroSumGame& g, const MarkovPolicy& opponent, Side responder) {
  const auto& d = g.dynamics;
  const int A = g.num_max_actions();
  const int B = g.num_min_actions();
  const int opp_actions = responder == Side::Max ? B : A;
  if (opponent.horizon != d.horizon || opponent.num_states != d.num_states || opponent.num_actions != opp_actions) {
    throw std::invalid_argument("best_response_value: opponent policy shape mismatch");
  }
  ValueTable t(d);
  for (int h = d.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < d.num_states; ++s) {
      for (std::size_t j = 0; j < d.num_joint(); ++j) {
        const std::size_t sa = d.sa_index(h, s, j);
        t.Q[sa] = g.reward[sa] + detail::expect_next(d, h, s, j, t);
      }
      const auto q = opponent.at(h, s);
      if (responder == Side::Max) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < A; ++a) {
          double v = 0.0;
          for (int b = 0; b < B; ++b) v += q[static_cast<std::size_t>(b)] * t.Q[d.sa_index(h, s, static_cast<std::size_t>(a * B + b))];
          best = std::max(best, v);
        }
        t.v(h, s) = best;
      } else {
        double best = std::numeric_limits<double>::infinity();
        for (int b = 0; b < B; ++b) {
          double v = 0.0;
          for (int a = 0; a < A; ++a) v += q[static_cast<std::size_t>(a)] * t.Q[d.sa_index(h, s, static_cast<std::size_t>(a * B + b))];
          best = std::min(best, v);
        }
        t.v(h, s) = best;
      }
    }
  }
  return t;
}

// V^{dagger, nu}_1(s_1) - V^{mu, dagger}_1(s_1)
inline double nash_gap(const ZeroSumGame& g, const MarkovPolicy& mu, const MarkovPolicy& nu) {
  const int s1 = g.initial_state();
  return best_response_value(g, nu, Side::Max).v(0, s1) - best_response_value(g, mu, Side::Min).v(0, s1);
}

inline double nash_gap(const ZeroSumGame& g, const CorrelatedPolicy& pi) {
  return nash_gap(g, marginalize(pi, 0), marginalize(pi, 1));
}

struct ExactNash {
  MarkovPolicy mu;
  MarkovPolicy nu;
  ValueTable values;
  double max_stage_gap = 0.0;  // largest per-state duality gap of the stage solves
};

// Backward induction with a matrix Nash solve per (h, s). The resulting
// policies have nash_gap at most 2 * H * tol.
inline ExactNash exact_nash(const ZeroSumGame& g, double tol = kDefaultSolverTol) {
  const auto& d = g.dynamics;
  const int A = g.num_max_actions();
  const int B = g.num_min_actions();
  ExactNash out{MarkovPolicy(0, d.horizon, d.num_states, A), MarkovPolicy(1, d.horizon, d.num_states, B), ValueTable(d), 0.0};
  for (int h = d.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < d.num_states; ++s) {
      Matrix M(A, B);
      for (int a = 0; a < A; ++a) {
        for (int b = 0; b < B; ++b) {
          const auto j = static_cast<std::size_t>(a * B + b);
          const std::size_t sa = d.sa_index(h, s, j);
          out.values.Q[sa] = g.reward[sa] + detail::expect_next(d, h, s, j, out.values);
          M(a, b) = out.values.Q[sa];
        }
      }
      const auto sol = solve_zero_sum_nash(M, tol);
      if (!sol.certificate.converged) throw SolverError("exact_nash: stage game not solved to tolerance", h, s);
      std::copy(sol.mu.begin(), sol.mu.end(), out.mu.at(h, s).begin());
      std::copy(sol.nu.begin(), sol.nu.end(), out.nu.at(h, s).begin());
      out.values.v(h, s) = sol.value;
      out.max_stage_gap = std::max(out.max_stage_gap, sol.certificate.duality_gap);
    }
  }
  return out;
}

// V^{dagger, pi_{-i}}_i: player i best-responds to the others' marginal.
inline ValueTable best_response_value(const GeneralSumGame& g, const CorrelatedPolicy& pi, int player) {
  const auto& d = g.dynamics;
  detail::check_policy(d, pi);
  const auto& sp = d.actions;
  const int n = sp.count(player);
  ValueTable t(d);
  for (int h = d.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < d.num_states; ++s) {
      for (std::size_t j = 0; j < d.num_joint(); ++j) {
        const std::size_t sa = d.sa_index(h, s, j);
        t.Q[sa] = g.r(player, h, s, j) + detail::expect_next(d, h, s, j, t);
      }
      const auto others = marginal_others(sp, pi.at(h, s), player);
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < n; ++a) {
        double v = 0.0;
        for (std::size_t o = 0; o < others.size(); ++o) v += others[o] * t.Q[d.sa_index(h, s, sp.join(player, a, o))];
        best = std::max(best, v);
      }
      t.v(h, s) = best;
    }
  }
  return t;
}

inline double exploitability(const GeneralSumGame& g, const CorrelatedPolicy& pi, int player) {
  const int s1 = g.initial_state();
  const auto values = policy_value(g, pi);
  return best_response_value(g, pi, player).v(0, s1) - values[static_cast<std::size_t>(player)].v(0, s1);
}

inline double cce_gap(const GeneralSumGame& g, const CorrelatedPolicy& pi) {
  const int s1 = g.initial_state();
  const auto values = policy_value(g, pi);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.num_players(); ++i) {
    worst = std::max(worst, best_response_value(g, pi, i).v(0, s1) - values[static_cast<std::size_t>(i)].v(0, s1));
  }
  return worst;
}

// phi[(h * S + s) * A_i + recommended] = substitute action.
struct StrategyModification {
  int player = 0;
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<int> map;

  [[nodiscard]] int operator()(int h, int s, int recommended) const {
    return map[static_cast<std::size_t>((h * num_states + s) * num_actions + recommended)];
  }
};

struct BestModification {
  StrategyModification phi;
  ValueTable values;  // V^{phi o pi}_i
};

// The best strategy modification of one player against pi, with its value.
inline BestModification best_modification_value(const GeneralSumGame& g, const CorrelatedPolicy& pi, int player) {
  const auto& d = g.dynamics;
  detail::check_policy(d, pi);
  const auto& sp = d.actions;
  const int n = sp.count(player);
  BestModification out{StrategyModification{player, d.horizon, d.num_states, n,
                                            std::vector<int>(static_cast<std::size_t>(d.horizon * d.num_states * n))},
                       ValueTable(d)};
  auto& t = out.values;
  std::vector<double> gain(static_cast<std::size_t>(n * n));
  for (int h = d.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < d.num_states; ++s) {
      for (std::size_t j = 0; j < d.num_joint(); ++j) {
        const std::size_t sa = d.sa_index(h, s, j);
        t.Q[sa] = g.r(player, h, s, j) + detail::expect_next(d, h, s, j, t);
      }
      // gain[rec * n + sub] = sum over joint actions recommending rec of pi * Q(sub, others)
      std::fill(gain.begin(), gain.end(), 0.0);
      const auto dist = pi.at(h, s);
      for (std::size_t j = 0; j < d.num_joint(); ++j) {
        if (dist[j] == 0.0) continue;
        const int rec = sp.action_of(j, player);
        for (int sub = 0; sub < n; ++sub) {
          gain[static_cast<std::size_t>(rec * n + sub)] += dist[j] * t.Q[d.sa_index(h, s, sp.with_action(j, player, sub))];
        }
      }
      double v = 0.0;
      for (int rec = 0; rec < n; ++rec) {
        int best = rec;
        for (int sub = 0; sub < n; ++sub) {
          if (gain[static_cast<std::size_t>(rec * n + sub)] > gain[static_cast<std::size_t>(rec * n + best)]) best = sub;
        }
        out.phi.map[static_cast<std::size_t>((h * d.num_states + s) * n + rec)] = best;
        v += gain[static_cast<std::size_t>(rec * n + best)];
      }
      t.v(h, s) = v;
    }
  }
  return out;
}

struct CeGap {
  double gap = 0.0;
  std::vector<double> per_player;
  std::vector<StrategyModification> witnesses;
};

inline CeGap ce_gap(const GeneralSumGame& g, const CorrelatedPolicy& pi) {
  const int s1 = g.initial_state();
  const auto values = policy_value(g, pi);
  CeGap out;
  out.gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.num_players(); ++i) {
    auto best = best_modification_value(g, pi, i);
    const double gi = best.values.v(0, s1) - values[static_cast<std::size_t>(i)].v(0, s1);
    out.per_player.push_back(gi);
    out.witnesses.push_back(std::move(best.phi));
    out.gap = std::max(out.gap, gi);
  }
  return out;
}

struct GapReport {
  std::vector<double> exploitability;  // per player
  std::vector<double> value_of_policy;  // V^pi_{1,i}(s_1)
  double cce_gap = 0.0;
  CeGap ce;
  std::optional<double> nash_gap;  // zero-sum games only
};

inline GapReport evaluate_policy(const GeneralSumGame& g, const CorrelatedPolicy& pi) {
  GapReport r;
  const int s1 = g.initial_state();
  const auto values = policy_value(g, pi);
  r.cce_gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.num_players(); ++i) {
    const double v = values[static_cast<std::size_t>(i)].v(0, s1);
    const double e = best_response_value(g, pi, i).v(0, s1) - v;
    r.value_of_policy.push_back(v);
    r.exploitability.push_back(e);
    r.cce_gap = std::max(r.cce_gap, e);
  }
  r.ce = ce_gap(g, pi);
  return r;
}

inline GapReport evaluate_policy(const ZeroSumGame& g, const CorrelatedPolicy& pi) {
  auto r = evaluate_policy(to_general_sum(g), pi);
  r.value_of_policy.resize(1);  // max-player value in the original game
  r.nash_gap = nash_gap(g, pi);
  return r;
}

}  // namespace nashvi
