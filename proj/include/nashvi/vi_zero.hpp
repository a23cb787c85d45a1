#pragma once

// Reward-free exploration (optimistic value iteration with zero reward and a
// greedy joint policy), reward estimation from datasets collected on the
// explored trajectories, and planning on the learned model.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
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

namespace nashvi {

enum class ExplorationBonus {
  TwoTerm,  // c (sqrt(H^2 iota / t) + H^2 S iota / t), two players
  SqrtS,    // c sqrt(H^2 S iota / t), m players
};

struct ExplorationConfig {
  double c = 1.0;
  std::optional<double> iota;
  double failure_prob = 0.05;
  ExplorationBonus bonus = ExplorationBonus::TwoTerm;
  bool record_wall_clock = false;
};

struct ExplorationState {
  int horizon = 0;
  int num_states = 0;
  int initial_state = 0;
  EmpiricalModel model;
  std::vector<double> Q;  // uncertainty table, indexed like rewards
  std::vector<double> V;  // (H + 1) * S
  CorrelatedPolicy policy;  // greedy point masses
  double best_gap = 0.0;
  Dynamics p_out;
  int output_episode = 0;
  int episode = 0;

  ExplorationState() = default;
  explicit ExplorationState(const Dynamics& shape)
      : horizon(shape.horizon), num_states(shape.num_states), initial_state(shape.initial_state), model(shape),
        Q(shape.num_sa(), static_cast<double>(shape.horizon)),
        V(static_cast<std::size_t>((shape.horizon + 1) * shape.num_states), 0.0), policy(uniform_policy(shape)),
        best_gap(static_cast<double>(shape.horizon)), p_out(model.estimate()) {}

  [[nodiscard]] double v(int h, int s) const { return V[static_cast<std::size_t>(h * num_states + s)]; }
  [[nodiscard]] double value_at_start() const { return v(0, initial_state); }
};

// One transition observed during exploration; joint is the encoded joint action.
struct TransitionRecord {
  int episode = 0;
  int h = 0;
  int s = 0;
  std::size_t joint = 0;
  int s_next = 0;
};

struct ExplorationResult {
  Dynamics p_out;
  RunLog log;
  std::vector<TransitionRecord> transitions;
};

inline double exploration_bonus(const ExplorationConfig& cfg, std::int64_t t, double H, double S, double iota) {
  return cfg.bonus == ExplorationBonus::TwoTerm ? hoeffding_bonus(t, H, S, iota, cfg.c) : sqrt_s_bonus(t, H, S, iota, cfg.c);
}

// Backward sweep with zero reward; the greedy action is the lowest-index
// maximizer of the uncertainty table.
inline void exploration_pass(ExplorationState& st, const ExplorationConfig& cfg, double iota) {
  const auto& d = st.model.estimate();
  const double H = st.horizon;
  const double S = st.num_states;
  const std::size_t J = d.num_joint();
  for (int h = st.horizon - 1; h >= 0; --h) {
    const double* v_next = st.V.data() + static_cast<std::size_t>((h + 1) * st.num_states);
    for (int s = 0; s < st.num_states; ++s) {
      double best = -1.0;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < J; ++j) {
        const std::size_t sa = d.sa_index(h, s, j);
        const auto t = st.model.count(sa);
        if (t > 0) {
          const auto p = st.model.phat(sa);
          double pv = 0.0;
          for (std::size_t k = 0; k < p.size(); ++k) pv += p[k] * v_next[k];
          st.Q[sa] = std::min(pv + exploration_bonus(cfg, t, H, S, iota), H);
        }
        if (st.Q[sa] > best) {
          best = st.Q[sa];
          arg = j;
        }
      }
      st.V[static_cast<std::size_t>(h * st.num_states + s)] = best;
      auto row = st.policy.at(h, s);
      std::fill(row.begin(), row.end(), 0.0);
      row[arg] = 1.0;
    }
  }
  ++st.episode;
}

// Never reads rewards: only the dynamics are passed in.
inline ExplorationResult explore(const Dynamics& dynamics, int K, const ExplorationConfig& cfg, std::uint64_t seed) {
  if (K < 1) throw std::invalid_argument("explore: K must be at least 1");
  if (!(cfg.c > 0.0)) throw std::invalid_argument("explore: c must be positive");
  if (auto v = detail::validate_dynamics(dynamics)) throw std::invalid_argument(describe(*v));
  double iota = 0.0;
  if (cfg.iota) {
    if (!(*cfg.iota > 0.0)) throw std::invalid_argument("explore: iota must be positive");
    iota = *cfg.iota;
  } else {
    if (!(cfg.failure_prob > 0.0 && cfg.failure_prob < 1.0)) throw std::invalid_argument("explore: failure probability must be in (0,1)");
    iota = std::log(static_cast<double>(dynamics.num_states) * static_cast<double>(dynamics.num_joint()) *
                    static_cast<double>(K) * dynamics.horizon / cfg.failure_prob);
  }

  ExplorationState st(dynamics);
  ExplorationResult out;
  const auto t0 = std::chrono::steady_clock::now();
  out.transitions.reserve(static_cast<std::size_t>(K) * static_cast<std::size_t>(dynamics.horizon));
  for (int k = 1; k <= K; ++k) {
    exploration_pass(st, cfg, iota);
    const double gap = st.value_at_start();
    if (gap < st.best_gap) {
      st.best_gap = gap;
      st.p_out = st.model.estimate();
      st.output_episode = k;
    } else if (st.output_episode == 0) {
      st.output_episode = k;  // p_out already holds this episode's (uniform) estimate
    }
    EpisodeRecord rec{k, gap, st.best_gap, std::nullopt, 0};

    const auto traj = sample_transitions(dynamics, st.policy, episode_rng(seed, static_cast<std::uint64_t>(k)));
    for (std::size_t h = 0; h < traj.steps.size(); ++h) {
      const auto& step = traj.steps[h];
      out.transitions.push_back({k, static_cast<int>(h), step.state, step.joint_action, step.next_state});
    }
    st.model.observe(traj);
    if (cfg.record_wall_clock) {
      rec.wall_clock_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
    }
    out.log.episodes.push_back(rec);
  }
  out.log.output_episode = st.output_episode;
  out.p_out = std::move(st.p_out);
  return out;
}

// ---------------------------------------------------------------------------
// Reward datasets

struct RewardRecord {
  int episode = 0;
  int h = 0;
  int s = 0;
  std::vector<int> actions;  // one per player
  int s_next = 0;
  double reward = 0.0;
};

struct RewardDataset {
  std::vector<RewardRecord> records;
};

// Attaches `samples_per_visit` realized rewards of one task to every
// explored transition. Realizations are Bernoulli(mean) or the mean itself.
inline RewardDataset augment_with_rewards(const Dynamics& d, const std::vector<TransitionRecord>& transitions,
                                          const std::vector<double>& mean_reward, RewardKind kind, int samples_per_visit,
                                          std::uint64_t seed) {
  if (mean_reward.size() != d.num_sa()) throw std::invalid_argument("augment_with_rewards: reward table shape mismatch");
  if (samples_per_visit < 1) throw std::invalid_argument("augment_with_rewards: samples_per_visit must be at least 1");
  RewardDataset out;
  out.records.reserve(transitions.size() * static_cast<std::size_t>(samples_per_visit));
  CounterRng base(seed, 0x726577617264ULL);
  std::uint64_t n = 0;
  for (const auto& tr : transitions) {
    const double mean = mean_reward[d.sa_index(tr.h, tr.s, tr.joint)];
    for (int rep = 0; rep < samples_per_visit; ++rep) {
      auto rng = base.split(n++);
      out.records.push_back({tr.episode, tr.h, tr.s, d.actions.decode(tr.joint), tr.s_next, detail::realize(kind, mean, rng)});
    }
  }
  return out;
}

// Mean realized reward per (h, s, joint action); 0 where no data.
inline std::vector<double> estimate_reward(const RewardDataset& data, const Dynamics& shape) {
  std::vector<double> mean(shape.num_sa(), 0.0);
  std::vector<std::int64_t> cnt(shape.num_sa(), 0);
  for (const auto& r : data.records) {
    if (r.h < 0 || r.h >= shape.horizon || r.s < 0 || r.s >= shape.num_states) {
      throw std::invalid_argument("estimate_reward: record outside the game shape");
    }
    if (static_cast<int>(r.actions.size()) != shape.actions.num_players()) {
      throw std::invalid_argument("estimate_reward: record has the wrong number of actions");
    }
    for (int i = 0; i < shape.actions.num_players(); ++i) {
      const int a = r.actions[static_cast<std::size_t>(i)];
      if (a < 0 || a >= shape.actions.count(i)) throw std::invalid_argument("estimate_reward: action out of range");
    }
    const std::size_t sa = shape.sa_index(r.h, r.s, shape.actions.encode(r.actions));
    // running mean: repeated identical rewards stay exact
    ++cnt[sa];
    mean[sa] += (r.reward - mean[sa]) / static_cast<double>(cnt[sa]);
  }
  return mean;
}

// Text format: '#' comment lines, then one record per line
//   episode,h,s,a_1,...,a_m,s_next,reward
// with 0-based indices and the reward printed with 17 significant digits.
inline void write_dataset(std::ostream& os, const RewardDataset& data, int num_players) {
  os << "# episode,h,s";
  for (int i = 1; i <= num_players; ++i) os << ",a" << i;
  os << ",s_next,reward\n";
  char buf[64];
  for (const auto& r : data.records) {
    if (static_cast<int>(r.actions.size()) != num_players) throw std::invalid_argument("write_dataset: wrong number of actions");
    os << r.episode << ',' << r.h << ',' << r.s;
    for (int a : r.actions) os << ',' << a;
    std::snprintf(buf, sizeof buf, "%.17g", r.reward);
    os << ',' << r.s_next << ',' << buf << '\n';
  }
}

inline RewardDataset read_dataset(std::istream& is, int num_players) {
  RewardDataset out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != static_cast<std::size_t>(num_players) + 5) {
      throw std::runtime_error("read_dataset: line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) + " fields");
    }
    try {
      RewardRecord r;
      r.episode = std::stoi(fields[0]);
      r.h = std::stoi(fields[1]);
      r.s = std::stoi(fields[2]);
      for (int i = 0; i < num_players; ++i) r.actions.push_back(std::stoi(fields[3 + static_cast<std::size_t>(i)]));
      r.s_next = std::stoi(fields[3 + static_cast<std::size_t>(num_players)]);
      r.reward = std::stod(fields[4 + static_cast<std::size_t>(num_players)]);
      if (!(r.reward >= 0.0 && r.reward <= 1.0)) throw std::out_of_range("reward");
      out.records.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("read_dataset: malformed line " + std::to_string(lineno));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Planning on a known (estimated) model

struct NashPlan {
  MarkovPolicy mu;
  MarkovPolicy nu;
  ValueTable values;
};

// Backward induction with a zero-sum matrix Nash solve at every state.
inline NashPlan plan_nash(const Dynamics& model, const std::vector<double>& reward, double tol = kDefaultSolverTol) {
  if (model.actions.num_players() != 2) throw std::invalid_argument("plan_nash: two-player model required");
  if (reward.size() != model.num_sa()) throw std::invalid_argument("plan_nash: reward table shape mismatch");
  const int A = model.actions.count(0);
  const int B = model.actions.count(1);
  NashPlan out{MarkovPolicy(0, model.horizon, model.num_states, A), MarkovPolicy(1, model.horizon, model.num_states, B),
               ValueTable(model)};
  Matrix Q(A, B);
  for (int h = model.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < model.num_states; ++s) {
      for (std::size_t j = 0; j < model.num_joint(); ++j) {
        const std::size_t sa = model.sa_index(h, s, j);
        out.values.Q[sa] = reward[sa] + detail::expect_next(model, h, s, j, out.values);
        Q.data[j] = out.values.Q[sa];
      }
      const auto sol = solve_zero_sum_nash(Q, tol);
      if (!sol.certificate.converged) throw SolverError("plan_nash: matrix solve did not certify", h, s);
      auto mu = out.mu.at(h, s);
      auto nu = out.nu.at(h, s);
      std::copy(sol.mu.begin(), sol.mu.end(), mu.begin());
      std::copy(sol.nu.begin(), sol.nu.end(), nu.begin());
      out.values.v(h, s) = bilinear(Q, sol.mu, sol.nu);
    }
  }
  return out;
}

struct EquilibriumPlan {
  CorrelatedPolicy policy;
  std::vector<ValueTable> values;  // per player
};

// Backward induction with a one-step equilibrium of the requested kind on
// the per-player Q tensors at every state.
inline EquilibriumPlan plan_equilibrium_general(const Dynamics& model, const std::vector<std::vector<double>>& rewards,
                                                EquilibriumKind kind, double tol = kDefaultSolverTol) {
  const int m = model.actions.num_players();
  if (static_cast<int>(rewards.size()) != m) throw std::invalid_argument("plan_equilibrium_general: one reward table per player required");
  for (const auto& r : rewards)
    if (r.size() != model.num_sa()) throw std::invalid_argument("plan_equilibrium_general: reward table shape mismatch");
  EquilibriumPlan out{uniform_policy(model), std::vector<ValueTable>(static_cast<std::size_t>(m), ValueTable(model))};
  TensorGame tg{model.actions, std::vector<std::vector<double>>(static_cast<std::size_t>(m), std::vector<double>(model.num_joint()))};
  for (int h = model.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < model.num_states; ++s) {
      for (int i = 0; i < m; ++i) {
        auto& vt = out.values[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < model.num_joint(); ++j) {
          const std::size_t sa = model.sa_index(h, s, j);
          vt.Q[sa] = rewards[static_cast<std::size_t>(i)][sa] + detail::expect_next(model, h, s, j, vt);
          tg.payoffs[static_cast<std::size_t>(i)][j] = vt.Q[sa];
        }
      }
      const auto cert = find_equilibrium(tg, kind, tol);
      if (!cert.converged) throw SolverError("plan_equilibrium_general: one-step solve did not certify", h, s);
      auto dst = out.policy.at(h, s);
      std::copy(cert.joint_dist.begin(), cert.joint_dist.end(), dst.begin());
      for (int i = 0; i < m; ++i) {
        out.values[static_cast<std::size_t>(i)].v(h, s) = policy_expectation(tg.payoffs[static_cast<std::size_t>(i)], dst);
      }
    }
  }
  return out;
}

}  // namespace nashvi
