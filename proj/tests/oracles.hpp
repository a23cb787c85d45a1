#pragma once

// Brute-force reference computations used by the tests. Nothing here calls
// the library's dynamic programs; values come from explicit recursion over
// trajectories and exhaustive enumeration of policies or modifications.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "nashvi/game.hpp"
#include "nashvi/policy.hpp"

namespace oracle {

using nashvi::CorrelatedPolicy;
using nashvi::Dynamics;
using nashvi::GeneralSumGame;
using nashvi::MarkovPolicy;
using nashvi::ZeroSumGame;

// Joint action index -> per-player actions, player 0 most significant.
inline std::vector<int> decode(const std::vector<int>& counts, std::size_t joint) {
  std::vector<int> a(counts.size());
  for (std::size_t i = counts.size(); i-- > 0;) {
    a[i] = static_cast<int>(joint % static_cast<std::size_t>(counts[i]));
    joint /= static_cast<std::size_t>(counts[i]);
  }
  return a;
}

inline std::size_t encode(const std::vector<int>& counts, const std::vector<int>& a) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) j = j * static_cast<std::size_t>(counts[i]) + static_cast<std::size_t>(a[i]);
  return j;
}

inline std::size_t joint_count(const std::vector<int>& counts) {
  std::size_t n = 1;
  for (int c : counts) n *= static_cast<std::size_t>(c);
  return n;
}

// Raw table access that does not go through Dynamics::sa_index.
inline double trans(const Dynamics& d, int h, int s, std::size_t j, int s2) {
  const std::size_t J = joint_count(d.actions.counts());
  const auto S = static_cast<std::size_t>(d.num_states);
  return d.transition[((static_cast<std::size_t>(h) * S + static_cast<std::size_t>(s)) * J + j) * S + static_cast<std::size_t>(s2)];
}

inline double reward_at(const std::vector<double>& table, const Dynamics& d, int h, int s, std::size_t j) {
  const std::size_t J = joint_count(d.actions.counts());
  return table[(static_cast<std::size_t>(h) * static_cast<std::size_t>(d.num_states) + static_cast<std::size_t>(s)) * J + j];
}

// joint distribution at (h, s)
using JointFn = std::function<std::vector<double>(int h, int s)>;

// Expected reward-to-go from (h, s) by explicit recursion over the
// trajectory tree (no memoization).
inline double rollout_value(const Dynamics& d, const std::vector<double>& reward, const JointFn& pi, int h, int s) {
  if (h == d.horizon) return 0.0;
  const auto dist = pi(h, s);
  double v = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (dist[j] == 0.0) continue;
    double cont = reward_at(reward, d, h, s, j);
    for (int s2 = 0; s2 < d.num_states; ++s2) {
      const double p = trans(d, h, s, j, s2);
      if (p != 0.0) cont += p * rollout_value(d, reward, pi, h + 1, s2);
    }
    v += dist[j] * cont;
  }
  return v;
}

inline JointFn from_correlated(const CorrelatedPolicy& pi) {
  return [&pi](int h, int s) {
    const auto row = pi.at(h, s);
    return std::vector<double>(row.begin(), row.end());
  };
}

// Every deterministic Markov policy for a player with n actions on (H, S):
// policy index -> action at (h, s).
inline std::vector<std::vector<int>> all_deterministic(int H, int S, int n) {
  const int cells = H * S;
  std::size_t total = 1;
  for (int k = 0; k < cells; ++k) total *= static_cast<std::size_t>(n);
  std::vector<std::vector<int>> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<int> a(static_cast<std::size_t>(cells));
    std::size_t c = code;
    for (int k = 0; k < cells; ++k) {
      a[static_cast<std::size_t>(k)] = static_cast<int>(c % static_cast<std::size_t>(n));
      c /= static_cast<std::size_t>(n);
    }
    out.push_back(std::move(a));
  }
  return out;
}

// Best-response value at (h, s) for `player` of a zero-sum game (player 0
// maximizes r, player 1 minimizes r) against the opponent's Markov policy,
// by enumerating every deterministic policy of the responder.
inline double brute_best_response(const ZeroSumGame& g, const MarkovPolicy& opponent, int responder, int h0, int s0) {
  const auto& d = g.dynamics;
  const auto counts = d.actions.counts();
  const int n = counts[static_cast<std::size_t>(responder)];
  double best = responder == 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (const auto& det : all_deterministic(d.horizon, d.num_states, n)) {
    JointFn pi = [&](int h, int s) {
      std::vector<double> dist(joint_count(counts), 0.0);
      const int mine = det[static_cast<std::size_t>(h * d.num_states + s)];
      const auto opp = opponent.at(h, s);
      for (int o = 0; o < static_cast<int>(opp.size()); ++o) {
        std::vector<int> a(2);
        a[static_cast<std::size_t>(responder)] = mine;
        a[static_cast<std::size_t>(1 - responder)] = o;
        dist[encode(counts, a)] += opp[static_cast<std::size_t>(o)];
      }
      return dist;
    };
    const double v = rollout_value(d, g.reward, pi, h0, s0);
    best = responder == 0 ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

// max over all strategy modifications phi of V^{phi o pi}_i(s_1) - V^pi_i(s_1),
// enumerating every per-(h, s) map from the player's actions to itself.
inline double brute_ce_gap_player(const GeneralSumGame& g, const CorrelatedPolicy& pi, int player) {
  const auto& d = g.dynamics;
  const auto counts = d.actions.counts();
  const int n = counts[static_cast<std::size_t>(player)];
  const int cells = d.horizon * d.num_states;
  std::size_t maps_per_cell = 1;
  for (int k = 0; k < n; ++k) maps_per_cell *= static_cast<std::size_t>(n);
  std::size_t total = 1;
  for (int k = 0; k < cells; ++k) total *= maps_per_cell;
  const auto& r = g.rewards[static_cast<std::size_t>(player)];
  const double base = rollout_value(d, r, from_correlated(pi), 0, d.initial_state);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < total; ++code) {
    // phi[cell][rec]
    std::vector<std::vector<int>> phi(static_cast<std::size_t>(cells), std::vector<int>(static_cast<std::size_t>(n)));
    std::size_t c = code;
    for (auto& cell : phi)
      for (auto& x : cell) {
        x = static_cast<int>(c % static_cast<std::size_t>(n));
        c /= static_cast<std::size_t>(n);
      }
    JointFn modified = [&](int h, int s) {
      const auto row = pi.at(h, s);
      std::vector<double> dist(row.size(), 0.0);
      for (std::size_t j = 0; j < row.size(); ++j) {
        auto a = decode(counts, j);
        a[static_cast<std::size_t>(player)] = phi[static_cast<std::size_t>(h * d.num_states + s)][static_cast<std::size_t>(a[static_cast<std::size_t>(player)])];
        dist[encode(counts, a)] += row[j];
      }
      return dist;
    };
    best = std::max(best, rollout_value(d, r, modified, 0, d.initial_state) - base);
  }
  return best;
}

// Largest unconditional unilateral deviation gain at s_1 for `player`,
// enumerating deterministic deviation policies (others follow their
// marginal of pi, independent of the deviator).
inline double brute_cce_gap_player(const GeneralSumGame& g, const CorrelatedPolicy& pi, int player) {
  const auto& d = g.dynamics;
  const auto counts = d.actions.counts();
  const int n = counts[static_cast<std::size_t>(player)];
  const auto& r = g.rewards[static_cast<std::size_t>(player)];
  const double base = rollout_value(d, r, from_correlated(pi), 0, d.initial_state);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& det : all_deterministic(d.horizon, d.num_states, n)) {
    JointFn dev = [&](int h, int s) {
      const auto row = pi.at(h, s);
      std::vector<double> dist(row.size(), 0.0);
      for (std::size_t j = 0; j < row.size(); ++j) {
        auto a = decode(counts, j);
        a[static_cast<std::size_t>(player)] = det[static_cast<std::size_t>(h * d.num_states + s)];
        dist[encode(counts, a)] += row[j];
      }
      return dist;
    };
    best = std::max(best, rollout_value(d, r, dev, 0, d.initial_state) - base);
  }
  return best;
}

// Random distribution with occasional exact zeros.
inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, bool allow_zeros = true) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& x : p) {
    x = (allow_zeros && U(rng) < 0.2) ? 0.0 : U(rng) + 1e-3;
    sum += x;
  }
  if (sum == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (auto& x : p) x /= sum;
  return p;
}

inline CorrelatedPolicy random_correlated(std::mt19937_64& rng, const Dynamics& d) {
  CorrelatedPolicy pi(d.horizon, d.num_states, d.actions);
  for (int h = 0; h < d.horizon; ++h)
    for (int s = 0; s < d.num_states; ++s) {
      const auto p = random_distribution(rng, pi.num_joint());
      std::copy(p.begin(), p.end(), pi.at(h, s).begin());
    }
  return pi;
}

inline MarkovPolicy random_markov(std::mt19937_64& rng, int player, int H, int S, int n) {
  MarkovPolicy mp(player, H, S, n);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      const auto p = random_distribution(rng, static_cast<std::size_t>(n));
      std::copy(p.begin(), p.end(), mp.at(h, s).begin());
    }
  return mp;
}

// Per-swap CE deviation gains and unconditional CCE gains of a one-shot
// game given by per-player payoff tensors, by direct enumeration.
inline double matrix_ce_violation(const std::vector<int>& counts, const std::vector<std::vector<double>>& payoffs,
                                  const std::vector<double>& pi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (int rec = 0; rec < counts[i]; ++rec)
      for (int sub = 0; sub < counts[i]; ++sub) {
        double gain = 0.0;
        for (std::size_t j = 0; j < pi.size(); ++j) {
          auto a = decode(counts, j);
          if (a[i] != rec) continue;
          a[i] = sub;
          gain += pi[j] * (payoffs[i][encode(counts, a)] - payoffs[i][j]);
        }
        worst = std::max(worst, gain);
      }
  }
  return worst;
}

inline double matrix_cce_violation(const std::vector<int>& counts, const std::vector<std::vector<double>>& payoffs,
                                   const std::vector<double>& pi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double on = 0.0;
    for (std::size_t j = 0; j < pi.size(); ++j) on += pi[j] * payoffs[i][j];
    for (int dev = 0; dev < counts[i]; ++dev) {
      double v = 0.0;
      for (std::size_t j = 0; j < pi.size(); ++j) {
        auto a = decode(counts, j);
        a[i] = dev;
        v += pi[j] * payoffs[i][encode(counts, a)];
      }
      worst = std::max(worst, v - on);
    }
  }
  return worst;
}

// max over CE modifications (all maps rec -> sub) of the expected gain,
// enumerated; equals the sum over rec of the best swap gain.
inline double matrix_ce_modification_gain(const std::vector<int>& counts, const std::vector<std::vector<double>>& payoffs,
                                          const std::vector<double>& pi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const int n = counts[i];
    std::size_t total = 1;
    for (int k = 0; k < n; ++k) total *= static_cast<std::size_t>(n);
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<int> phi(static_cast<std::size_t>(n));
      std::size_t c = code;
      for (auto& x : phi) {
        x = static_cast<int>(c % static_cast<std::size_t>(n));
        c /= static_cast<std::size_t>(n);
      }
      double gain = 0.0;
      for (std::size_t j = 0; j < pi.size(); ++j) {
        auto a = decode(counts, j);
        a[i] = phi[static_cast<std::size_t>(a[i])];
        gain += pi[j] * (payoffs[i][encode(counts, a)] - payoffs[i][j]);
      }
      worst = std::max(worst, gain);
    }
  }
  return worst;
}

// max_a (M nu)_a - min_b (mu^T M)_b for a row-major A x B matrix.
inline double matrix_duality_gap(const std::vector<double>& M, int A, int B, const std::vector<double>& mu,
                                 const std::vector<double>& nu) {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (int a = 0; a < A; ++a) {
    double v = 0.0;
    for (int b = 0; b < B; ++b) v += M[static_cast<std::size_t>(a * B + b)] * nu[static_cast<std::size_t>(b)];
    hi = std::max(hi, v);
  }
  for (int b = 0; b < B; ++b) {
    double v = 0.0;
    for (int a = 0; a < A; ++a) v += M[static_cast<std::size_t>(a * B + b)] * mu[static_cast<std::size_t>(a)];
    lo = std::min(lo, v);
  }
  return hi - lo;
}

}  // namespace oracle
