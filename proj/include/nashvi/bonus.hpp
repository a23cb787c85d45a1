#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

namespace nashvi {

enum class BonusKind { Hoeffding, Bernstein };

struct BonusConfig {
  BonusKind kind = BonusKind::Hoeffding;
  double c_beta = 1.0;
  double c_gamma = 1.0;
  // Fixed log factor; when empty it is computed as log(S * A * B * T / p).
  std::optional<double> iota;
  double failure_prob = 0.05;

  void check() const {
    if (!(c_beta > 0.0) || !(c_gamma > 0.0)) throw std::invalid_argument("bonus constants must be positive");
    if (iota && !(*iota > 0.0)) throw std::invalid_argument("iota must be positive");
    if (!(failure_prob > 0.0 && failure_prob <= 1.0)) throw std::invalid_argument("failure probability must be in (0, 1]");
  }

  // `cells` is S times the joint action count, `total_steps` is T = K H.
  [[nodiscard]] double resolve_iota(double cells, double total_steps) const {
    if (iota) return *iota;
    return std::log(cells * total_steps / failure_prob);
  }
};

// c (sqrt(H^2 iota / t) + H^2 S iota / t)
inline double hoeffding_bonus(long long t, double H, double S, double iota, double c_beta) {
  if (t <= 0) throw std::invalid_argument("hoeffding_bonus: visit count must be positive");
  const double td = static_cast<double>(t);
  return c_beta * (std::sqrt(H * H * iota / td) + H * H * S * iota / td);
}

// c (sqrt(sigma2 iota / t) + H^2 S iota / t)
inline double bernstein_bonus(long long t, double sigma2_hat, double H, double S, double iota, double c_beta) {
  if (t <= 0) throw std::invalid_argument("bernstein_bonus: visit count must be positive");
  if (!(sigma2_hat >= 0.0 && sigma2_hat <= H * H)) throw std::invalid_argument("bernstein_bonus: variance outside [0, H^2]");
  const double td = static_cast<double>(t);
  return c_beta * (std::sqrt(sigma2_hat * iota / td) + H * H * S * iota / td);
}

// P V^2 - (P V)^2, with round-off clamped into [0, H^2].
inline double empirical_variance(std::span<const double> p, std::span<const double> V, double H) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    m1 += p[k] * V[k];
    m2 += p[k] * V[k] * V[k];
  }
  return std::clamp(m2 - m1 * m1, 0.0, H * H);
}

// (c / H) P (V_up - V_low)
inline double gamma_bonus(std::span<const double> p, std::span<const double> V_up, std::span<const double> V_low, double H,
                          double c_gamma) {
  double e = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) e += p[k] * (V_up[k] - V_low[k]);
  return std::max(0.0, c_gamma / H * e);
}

// c sqrt(S H^2 iota / t): the multiplayer and multiplayer reward-free bonus.
inline double sqrt_s_bonus(long long t, double H, double S, double iota, double c) {
  if (t <= 0) throw std::invalid_argument("sqrt_s_bonus: visit count must be positive");
  return c * std::sqrt(S * H * H * iota / static_cast<double>(t));
}

}  // namespace nashvi
