#pragma once

// Optimistic value iteration for m-player general-sum games. Each player
// keeps its own upper and lower Q tables with the bonus c sqrt(S H^2 iota / t);
// the joint policy at every state is an equilibrium (Nash, CE or CCE) of the
// players' upper Q tensors.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashvi/bonus.hpp"
#include "nashvi/empirical_model.hpp"
#include "nashvi/evaluation.hpp"
#include "nashvi/game.hpp"
#include "nashvi/matrix_equilibrium.hpp"
#include "nashvi/policy.hpp"
#include "nashvi/run_log.hpp"
#include "nashvi/simulator.hpp"
#include "nashvi/vi_zero.hpp"

namespace nashvi {

inline constexpr double kDefaultCellBudget = 1e7;

struct MultiConfig {
  EquilibriumKind kind = EquilibriumKind::CCE;
  double c = 1.0;
  std::optional<double> iota;
  double failure_prob = 0.05;
  double solver_tol = kDefaultSolverTol;
  int eval_every = 10;
  double cell_budget = kDefaultCellBudget;  // limit on H * S * prod(A_i) * S
  bool record_wall_clock = false;
};

struct MultiLearnerState {
  int horizon = 0;
  int num_states = 0;
  int num_players = 0;
  int initial_state = 0;
  EmpiricalModel model;
  std::vector<std::vector<double>> Q_up;   // per player, indexed like rewards
  std::vector<std::vector<double>> Q_low;
  std::vector<std::vector<double>> V_up;   // per player, (H + 1) * S
  std::vector<std::vector<double>> V_low;
  CorrelatedPolicy policy;
  CorrelatedPolicy output_policy;
  double best_gap = 0.0;
  int output_episode = 0;
  int episode = 0;
  SolverStats solver;

  MultiLearnerState() = default;
  MultiLearnerState(const Dynamics& shape, double cell_budget)
      : horizon(shape.horizon), num_states(shape.num_states), num_players(shape.actions.num_players()),
        initial_state(shape.initial_state) {
    const double cells = static_cast<double>(shape.num_sa()) * shape.num_states;
    if (cells > cell_budget) {
      throw std::invalid_argument("MultiLearnerState: " + std::to_string(cells) + " table cells exceed the budget of " +
                                  std::to_string(cell_budget));
    }
    model = EmpiricalModel(shape, num_players);
    const auto m = static_cast<std::size_t>(num_players);
    const auto nv = static_cast<std::size_t>((horizon + 1) * num_states);
    Q_up.assign(m, std::vector<double>(shape.num_sa(), static_cast<double>(horizon)));
    Q_low.assign(m, std::vector<double>(shape.num_sa(), 0.0));
    V_up.assign(m, std::vector<double>(nv, 0.0));
    V_low.assign(m, std::vector<double>(nv, 0.0));
    policy = uniform_policy(shape);
    output_policy = policy;
    best_gap = horizon;
  }

  [[nodiscard]] std::size_t v_index(int h, int s) const { return static_cast<std::size_t>(h * num_states + s); }
  [[nodiscard]] double gap_at_start() const {
    double g = 0.0;
    for (int i = 0; i < num_players; ++i) {
      const auto k = static_cast<std::size_t>(i);
      g = std::max(g, V_up[k][v_index(0, initial_state)] - V_low[k][v_index(0, initial_state)]);
    }
    return g;
  }
};

inline void multi_value_iteration_pass(MultiLearnerState& st, const MultiConfig& cfg, double iota) {
  const auto& d = st.model.estimate();
  const int m = st.num_players;
  const int S = st.num_states;
  const double H = st.horizon;
  const std::size_t J = d.num_joint();
  TensorGame tg{d.actions, std::vector<std::vector<double>>(static_cast<std::size_t>(m), std::vector<double>(J))};

  for (int h = st.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (std::size_t j = 0; j < J; ++j) {
        const std::size_t sa = d.sa_index(h, s, j);
        const auto t = st.model.count(sa);
        if (t == 0) continue;
        const auto p = st.model.phat(sa);
        const double beta = sqrt_s_bonus(t, H, static_cast<double>(S), iota, cfg.c);
        for (int i = 0; i < m; ++i) {
          const auto k = static_cast<std::size_t>(i);
          const double* vu = st.V_up[k].data() + st.v_index(h + 1, 0);
          const double* vl = st.V_low[k].data() + st.v_index(h + 1, 0);
          double pu = 0.0;
          double pl = 0.0;
          for (std::size_t n = 0; n < p.size(); ++n) {
            pu += p[n] * vu[n];
            pl += p[n] * vl[n];
          }
          const double r = st.model.mean_reward(i, sa);
          st.Q_up[k][sa] = std::min(r + pu + beta, H);
          st.Q_low[k][sa] = std::max(r + pl - beta, 0.0);
        }
      }
      const std::size_t base = d.sa_index(h, s, 0);
      for (int i = 0; i < m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        std::copy_n(st.Q_up[k].begin() + static_cast<std::ptrdiff_t>(base), J, tg.payoffs[k].begin());
      }
      const auto cert = find_equilibrium(tg, cfg.kind, cfg.solver_tol);
      if (!cert.converged) throw SolverError("equilibrium subroutine failed to certify", h, s);
      st.solver.record(cert.max_constraint_residual, cert.iterations_used);
      auto dst = st.policy.at(h, s);
      std::copy(cert.joint_dist.begin(), cert.joint_dist.end(), dst.begin());
      for (int i = 0; i < m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const std::span<const double> qu(st.Q_up[k].data() + base, J);
        const std::span<const double> ql(st.Q_low[k].data() + base, J);
        st.V_up[k][st.v_index(h, s)] = policy_expectation(qu, dst);
        st.V_low[k][st.v_index(h, s)] = policy_expectation(ql, dst);
      }
    }
  }
  ++st.episode;
}

inline bool multi_track_output(MultiLearnerState& st) {
  const double gap = st.gap_at_start();
  if (gap < st.best_gap) {
    st.best_gap = gap;
    st.output_policy = st.policy;
    st.output_episode = st.episode;
    return true;
  }
  if (st.output_episode == 0) {
    st.output_policy = st.policy;
    st.output_episode = st.episode;
  }
  return false;
}

// Exact equilibrium gap of a policy for the given kind (CE gap for CE,
// best-response gap otherwise).
inline double equilibrium_gap(const GeneralSumGame& g, const CorrelatedPolicy& pi, EquilibriumKind kind) {
  return kind == EquilibriumKind::CE ? ce_gap(g, pi).gap : cce_gap(g, pi);
}

struct MultiRunResult {
  CorrelatedPolicy pi_out;
  RunLog log;
  MultiLearnerState final_state;
};

using MultiObserver = std::function<void(const MultiLearnerState&)>;

inline MultiRunResult multi_run(const GeneralSumGame& game, int K, const MultiConfig& cfg, std::uint64_t seed,
                                const MultiObserver& observer = {}) {
  require_valid(game);
  if (K < 1) throw std::invalid_argument("multi_run: K must be at least 1");
  if (!(cfg.c > 0.0)) throw std::invalid_argument("multi_run: c must be positive");
  if (cfg.kind == EquilibriumKind::Nash) {
    if (game.num_players() > 2) throw std::invalid_argument("multi_run: Nash subroutine supports at most two players");
    for (int i = 0; i < game.num_players(); ++i)
      if (game.dynamics.actions.count(i) > kTinyNashMaxActions) throw std::invalid_argument("multi_run: Nash subroutine supports at most four actions");
  }
  const auto& d = game.dynamics;
  BonusConfig bc;
  bc.iota = cfg.iota;
  bc.failure_prob = cfg.failure_prob;
  bc.check();
  const double iota = bc.resolve_iota(static_cast<double>(d.num_states) * static_cast<double>(d.num_joint()),
                                      static_cast<double>(K) * d.horizon);

  MultiLearnerState st(d, cfg.cell_budget);
  RunLog log;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 1; k <= K; ++k) {
    multi_value_iteration_pass(st, cfg, iota);
    multi_track_output(st);
    if (observer) observer(st);

    EpisodeRecord rec;
    rec.episode = k;
    rec.optimistic_gap = st.gap_at_start();
    rec.best_gap = st.best_gap;
    if (cfg.eval_every > 0 && (k % cfg.eval_every == 0 || k == K)) rec.exact_gap = equilibrium_gap(game, st.policy, cfg.kind);

    st.model.observe(sample_episode(game, st.policy, seed, static_cast<std::uint64_t>(k)));
    if (cfg.record_wall_clock) {
      rec.wall_clock_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
    }
    log.episodes.push_back(rec);
  }
  log.output_episode = st.output_episode;
  log.solver = st.solver;
  MultiRunResult out{st.output_policy, std::move(log), std::move(st)};
  return out;
}

// Reward-free exploration for m players: the same loop as `explore` with the
// bonus c sqrt(H^2 S iota / t) and the joint-action argmax.
inline ExplorationResult multi_explore(const Dynamics& dynamics, int K, ExplorationConfig cfg, std::uint64_t seed) {
  cfg.bonus = ExplorationBonus::SqrtS;
  return explore(dynamics, K, cfg, seed);
}

}  // namespace nashvi
