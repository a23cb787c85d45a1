#pragma once

// Optimistic Nash value iteration for two-player zero-sum games.
//
// Each episode runs a full backward sweep that maintains upper and lower
// Q estimates (with the concentration bonus beta and the auxiliary bonus
// gamma = (c/H) P-hat (V_up - V_low)), picks a CCE of (Q_up, Q_low) at
// every state, tracks the policy with the smallest optimistic gap at s_1,
// then plays the current policy for one episode and updates counts.

#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nashvi/bonus.hpp"
#include "nashvi/empirical_model.hpp"
#include "nashvi/evaluation.hpp"
#include "nashvi/game.hpp"
#include "nashvi/matrix_equilibrium.hpp"
#include "nashvi/policy.hpp"
#include "nashvi/run_log.hpp"
#include "nashvi/simulator.hpp"

namespace nashvi {

struct NashViConfig {
  BonusConfig bonus;
  double solver_tol = kDefaultSolverTol;
  int eval_every = 10;   // exact Nash gap of the deployed policy every n episodes; 0 disables
  int sweep_stride = 1;  // > 1 reuses the previous sweep between passes
  bool record_wall_clock = false;
};

struct LearnerState {
  int horizon = 0;
  int num_states = 0;
  int num_max_actions = 0;
  int num_min_actions = 0;
  int initial_state = 0;
  EmpiricalModel model;
  std::vector<double> Q_up;
  std::vector<double> Q_low;
  std::vector<double> V_up;   // (H + 1) * S, terminal row zero
  std::vector<double> V_low;
  CorrelatedPolicy policy;
  CorrelatedPolicy output_policy;
  double best_gap = 0.0;
  int output_episode = 0;  // 0 until an output policy exists
  int episode = 0;         // number of completed value-iteration passes
  SolverStats solver;

  LearnerState() = default;
  explicit LearnerState(const Dynamics& shape)
      : horizon(shape.horizon), num_states(shape.num_states), num_max_actions(shape.actions.count(0)),
        num_min_actions(shape.actions.count(1)), initial_state(shape.initial_state), model(shape, 1),
        Q_up(shape.num_sa(), static_cast<double>(shape.horizon)), Q_low(shape.num_sa(), 0.0),
        V_up(static_cast<std::size_t>((shape.horizon + 1) * shape.num_states), 0.0),
        V_low(static_cast<std::size_t>((shape.horizon + 1) * shape.num_states), 0.0),
        policy(uniform_policy(shape)), output_policy(uniform_policy(shape)),
        best_gap(static_cast<double>(shape.horizon)) {
    if (shape.actions.num_players() != 2) throw std::invalid_argument("LearnerState: two-player game required");
  }

  [[nodiscard]] std::size_t v_index(int h, int s) const { return static_cast<std::size_t>(h * num_states + s); }
  [[nodiscard]] double gap_at_start() const {
    return V_up[v_index(0, initial_state)] - V_low[v_index(0, initial_state)];
  }
};

// One backward sweep h = H..1. Entries never visited keep their current
// values (initially H and 0).
inline void value_iteration_pass(LearnerState& st, std::span<const double> reward, const BonusConfig& cfg, double iota,
                                 double solver_tol = kDefaultSolverTol) {
  const int H = st.horizon;
  const int S = st.num_states;
  const int A = st.num_max_actions;
  const int B = st.num_min_actions;
  const auto& shape = st.model.estimate();
  const double Hd = H;
  const double Sd = S;
  std::vector<double> mid(static_cast<std::size_t>(S));
  Matrix Qu(A, B), Ql(A, B);

  for (int h = H - 1; h >= 0; --h) {
    const std::span<const double> vu_next(st.V_up.data() + st.v_index(h + 1, 0), static_cast<std::size_t>(S));
    const std::span<const double> vl_next(st.V_low.data() + st.v_index(h + 1, 0), static_cast<std::size_t>(S));
    if (cfg.kind == BonusKind::Bernstein) {
      for (int k = 0; k < S; ++k) mid[static_cast<std::size_t>(k)] = 0.5 * (vu_next[static_cast<std::size_t>(k)] + vl_next[static_cast<std::size_t>(k)]);
    }
    for (int s = 0; s < S; ++s) {
      for (std::size_t j = 0; j < shape.num_joint(); ++j) {
        const std::size_t sa = shape.sa_index(h, s, j);
        const auto t = st.model.count(sa);
        if (t == 0) continue;
        const auto p = st.model.phat(sa);
        double pu = 0.0;
        double pl = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
          pu += p[k] * vu_next[k];
          pl += p[k] * vl_next[k];
        }
        const double beta = cfg.kind == BonusKind::Hoeffding
                                ? hoeffding_bonus(t, Hd, Sd, iota, cfg.c_beta)
                                : bernstein_bonus(t, empirical_variance(p, mid, Hd), Hd, Sd, iota, cfg.c_beta);
        const double gamma = gamma_bonus(p, vu_next, vl_next, Hd, cfg.c_gamma);
        st.Q_up[sa] = std::min(reward[sa] + pu + gamma + beta, Hd);
        st.Q_low[sa] = std::max(reward[sa] + pl - gamma - beta, 0.0);
      }
    }
    for (int s = 0; s < S; ++s) {
      const std::size_t base = shape.sa_index(h, s, 0);
      std::copy_n(st.Q_up.begin() + static_cast<std::ptrdiff_t>(base), A * B, Qu.data.begin());
      std::copy_n(st.Q_low.begin() + static_cast<std::ptrdiff_t>(base), A * B, Ql.data.begin());
      const auto cert = find_cce_pair(Qu, Ql, solver_tol);
      if (!cert.converged) throw SolverError("CCE subroutine failed to certify", h, s);
      st.solver.record(cert.max_constraint_residual, cert.iterations_used);
      auto dst = st.policy.at(h, s);
      std::copy(cert.joint_dist.begin(), cert.joint_dist.end(), dst.begin());
      st.V_up[st.v_index(h, s)] = policy_expectation(Qu.data, dst);
      st.V_low[st.v_index(h, s)] = policy_expectation(Ql.data, dst);
    }
  }
  ++st.episode;
}

inline void update_model(LearnerState& st, const Trajectory& traj) { st.model.observe(traj); }

// Replaces the output policy iff the current gap is strictly below the best
// so far. Before any improvement the first pass's policy is kept as output.
inline bool track_output(LearnerState& st) {
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

struct NashViResult {
  MarkovPolicy mu_out;
  MarkovPolicy nu_out;
  CorrelatedPolicy pi_out;
  RunLog log;
  LearnerState final_state;
};

// Called after every value-iteration pass, before the episode is played.
using NashViObserver = std::function<void(const LearnerState&)>;

inline NashViResult run_nash_vi(const ZeroSumGame& game, int K, const NashViConfig& cfg, std::uint64_t seed,
                                const NashViObserver& observer = {}) {
  require_valid(game);
  if (K < 1) throw std::invalid_argument("run_nash_vi: K must be at least 1");
  cfg.bonus.check();
  const auto& d = game.dynamics;
  const double iota = cfg.bonus.resolve_iota(static_cast<double>(d.num_states) * static_cast<double>(d.num_joint()),
                                             static_cast<double>(K) * d.horizon);
  LearnerState st(d);
  RunLog log;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 1; k <= K; ++k) {
    if (cfg.sweep_stride <= 1 || (k - 1) % cfg.sweep_stride == 0) {
      value_iteration_pass(st, st.model.mean_rewards(0), cfg.bonus, iota, cfg.solver_tol);
    } else {
      ++st.episode;
    }
    track_output(st);
    if (observer) observer(st);

    EpisodeRecord rec;
    rec.episode = k;
    rec.optimistic_gap = st.gap_at_start();
    rec.best_gap = st.best_gap;
    if (cfg.eval_every > 0 && (k % cfg.eval_every == 0 || k == K)) rec.exact_gap = nash_gap(game, st.policy);

    const auto traj = sample_episode(game, st.policy, seed, static_cast<std::uint64_t>(k));
    update_model(st, traj);
    if (cfg.record_wall_clock) {
      rec.wall_clock_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
    }
    log.episodes.push_back(rec);
  }
  log.output_episode = st.output_episode;
  log.solver = st.solver;
  NashViResult out{marginalize(st.output_policy, 0), marginalize(st.output_policy, 1), st.output_policy, std::move(log),
                   std::move(st)};
  return out;
}

}  // namespace nashvi
