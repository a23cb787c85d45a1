#pragma once

// One-step (matrix / tensor) game solvers. Every solver returns an
// EquilibriumCertificate whose residual or duality gap is recomputed from
// the returned distribution, never copied from solver internals.
//
// CE constraints use general strategy modifications (any map from a
// player's actions to itself, not only injective ones). For a one-step
// game these decompose into one constraint per (recommended, substitute)
// action pair.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashvi/game.hpp"
#include "nashvi/simplex.hpp"

namespace nashvi {

inline constexpr double kDefaultSolverTol = 1e-9;

enum class SolverMethod { Simplex, MultiplicativeWeights };

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, int h = -1, int s = -1)
      : std::runtime_error(h >= 0 ? what + " at (h=" + std::to_string(h) + ", s=" + std::to_string(s) + ")" : what),
        h_(h), s_(s) {}
  [[nodiscard]] int h() const { return h_; }
  [[nodiscard]] int s() const { return s_; }

 private:
  int h_;
  int s_;
};

// Dense row-major matrix; rows index the max-player's actions.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), fill) {}
  Matrix(int r, int c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != static_cast<std::size_t>(r * c)) throw std::invalid_argument("Matrix: size mismatch");
  }
  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows = static_cast<int>(init.size());
    cols = rows > 0 ? static_cast<int>(init.begin()->size()) : 0;
    for (const auto& row : init) {
      if (static_cast<int>(row.size()) != cols) throw std::invalid_argument("Matrix: ragged initializer");
      data.insert(data.end(), row.begin(), row.end());
    }
  }

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r * cols + c)]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r * cols + c)]; }

  [[nodiscard]] Matrix transposed() const {
    Matrix t(cols, rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
    return t;
  }
  [[nodiscard]] Matrix negated() const {
    Matrix n = *this;
    for (double& x : n.data) x = -x;
    return n;
  }
};

// Payoff tensors over a joint action space, one per player.
struct TensorGame {
  JointActionSpace actions;
  std::vector<std::vector<double>> payoffs;

  [[nodiscard]] int num_players() const { return actions.num_players(); }
};

struct EquilibriumCertificate {
  std::vector<double> joint_dist;
  std::vector<std::vector<double>> marginals;
  double max_constraint_residual = 0.0;
  double duality_gap = 0.0;  // zero-sum Nash only
  int iterations_used = 0;
  bool converged = true;
};

struct ZeroSumSolution {
  std::vector<double> mu;
  std::vector<double> nu;
  double value = 0.0;
  EquilibriumCertificate certificate;
};

// ---------------------------------------------------------------------------
// Independent recomputation of equilibrium conditions.

// max_a (Q nu)_a - min_b (mu^T Q)_b
inline double duality_gap(const Matrix& Q, std::span<const double> mu, std::span<const double> nu) {
  double best_row = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < Q.rows; ++a) {
    double v = 0.0;
    for (int b = 0; b < Q.cols; ++b) v += Q(a, b) * nu[static_cast<std::size_t>(b)];
    best_row = std::max(best_row, v);
  }
  double best_col = std::numeric_limits<double>::infinity();
  for (int b = 0; b < Q.cols; ++b) {
    double v = 0.0;
    for (int a = 0; a < Q.rows; ++a) v += Q(a, b) * mu[static_cast<std::size_t>(a)];
    best_col = std::min(best_col, v);
  }
  return best_row - best_col;
}

inline double bilinear(const Matrix& Q, std::span<const double> mu, std::span<const double> nu) {
  double v = 0.0;
  for (int a = 0; a < Q.rows; ++a)
    for (int b = 0; b < Q.cols; ++b) v += mu[static_cast<std::size_t>(a)] * Q(a, b) * nu[static_cast<std::size_t>(b)];
  return v;
}

// Max violation of the two-sided CCE conditions for the pair (Q_up, Q_low);
// pi is indexed a * B + b. Zero when all constraints hold.
inline double cce_pair_residual(const Matrix& Q_up, const Matrix& Q_low, std::span<const double> pi) {
  const int A = Q_up.rows;
  const int B = Q_up.cols;
  double on_up = 0.0;
  double on_low = 0.0;
  std::vector<double> col_marg(static_cast<std::size_t>(B), 0.0);
  std::vector<double> row_marg(static_cast<std::size_t>(A), 0.0);
  for (int a = 0; a < A; ++a) {
    for (int b = 0; b < B; ++b) {
      const double p = pi[static_cast<std::size_t>(a * B + b)];
      on_up += p * Q_up(a, b);
      on_low += p * Q_low(a, b);
      col_marg[static_cast<std::size_t>(b)] += p;
      row_marg[static_cast<std::size_t>(a)] += p;
    }
  }
  double worst = 0.0;
  for (int dev = 0; dev < A; ++dev) {
    double v = 0.0;
    for (int b = 0; b < B; ++b) v += col_marg[static_cast<std::size_t>(b)] * Q_up(dev, b);
    worst = std::max(worst, v - on_up);
  }
  for (int dev = 0; dev < B; ++dev) {
    double v = 0.0;
    for (int a = 0; a < A; ++a) v += row_marg[static_cast<std::size_t>(a)] * Q_low(a, dev);
    worst = std::max(worst, on_low - v);
  }
  return worst;
}

// Largest gain any player obtains from an unconditional unilateral
// deviation under pi (each player maximizes its own payoff).
inline double cce_residual(const TensorGame& g, std::span<const double> pi) {
  const auto& sp = g.actions;
  double worst = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    const auto& Qi = g.payoffs[static_cast<std::size_t>(i)];
    double on = 0.0;
    for (std::size_t j = 0; j < sp.size(); ++j) on += pi[j] * Qi[j];
    for (int dev = 0; dev < sp.count(i); ++dev) {
      double v = 0.0;
      for (std::size_t j = 0; j < sp.size(); ++j) v += pi[j] * Qi[sp.with_action(j, i, dev)];
      worst = std::max(worst, v - on);
    }
  }
  return worst;
}

// Largest gain from a single (recommended -> substitute) swap.
inline double ce_residual(const TensorGame& g, std::span<const double> pi) {
  const auto& sp = g.actions;
  double worst = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    const auto& Qi = g.payoffs[static_cast<std::size_t>(i)];
    for (int rec = 0; rec < sp.count(i); ++rec) {
      for (int sub = 0; sub < sp.count(i); ++sub) {
        if (sub == rec) continue;
        double gain = 0.0;
        for (std::size_t j = 0; j < sp.size(); ++j) {
          if (sp.action_of(j, i) != rec) continue;
          gain += pi[j] * (Qi[sp.with_action(j, i, sub)] - Qi[j]);
        }
        worst = std::max(worst, gain);
      }
    }
  }
  return worst;
}

// For a product distribution given by per-player marginals: the largest
// unilateral deviation gain.
inline double nash_residual(const TensorGame& g, const std::vector<std::vector<double>>& marginals) {
  const auto& sp = g.actions;
  std::vector<double> joint(sp.size());
  for (std::size_t j = 0; j < sp.size(); ++j) {
    double p = 1.0;
    for (int i = 0; i < g.num_players(); ++i) p *= marginals[static_cast<std::size_t>(i)][static_cast<std::size_t>(sp.action_of(j, i))];
    joint[j] = p;
  }
  return cce_residual(g, joint);
}

namespace detail {

inline void require_finite(std::span<const double> v, const char* who) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": non-finite payoff entry");
}

// Clip tiny negative round-off and renormalize.
inline void clean_distribution(std::vector<double>& p) {
  double sum = 0.0;
  for (double& x : p) {
    x = std::max(0.0, x);
    sum += x;
  }
  if (sum <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return;
  }
  for (double& x : p) x /= sum;
}

// Max-player strategy of a matrix game via
//   maximize w  s.t.  w - sum_a mu_a (Q(a,b) - qmin) <= 0  for all b,  sum mu = 1
// (w is the value shifted by qmin, hence nonnegative).
inline lp::Solution max_player_lp(const Matrix& Q) {
  const double qmin = *std::min_element(Q.data.begin(), Q.data.end());
  lp::Problem p;
  p.num_vars = static_cast<std::size_t>(Q.rows) + 1;
  p.objective.assign(p.num_vars, 0.0);
  p.objective.back() = 1.0;
  for (int b = 0; b < Q.cols; ++b) {
    std::vector<double> row(p.num_vars, 0.0);
    for (int a = 0; a < Q.rows; ++a) row[static_cast<std::size_t>(a)] = -(Q(a, b) - qmin);
    row.back() = 1.0;
    p.add(std::move(row), lp::Sense::LessEq, 0.0);
  }
  std::vector<double> simplex_row(p.num_vars, 1.0);
  simplex_row.back() = 0.0;
  p.add(std::move(simplex_row), lp::Sense::Equal, 1.0);
  return lp::solve(p);
}

struct MwResult {
  std::vector<double> x;  // row player (maximizer)
  std::vector<double> y;  // column player (minimizer)
  double gap = 0.0;
  int iterations = 0;
};

inline void softmax(std::span<const double> score, double eta, std::vector<double>& out) {
  const double mx = *std::max_element(score.begin(), score.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < score.size(); ++k) {
    out[k] = std::exp(eta * (score[k] - mx));
    sum += out[k];
  }
  for (double& v : out) v /= sum;
}

// Optimistic multiplicative-weights self-play on a zero-sum matrix game.
// Both the last iterate and the running average are candidates; the one
// with the smaller duality gap is kept.
inline MwResult multiplicative_weights(const Matrix& Q, double target_gap, int budget) {
  const auto R = static_cast<std::size_t>(Q.rows);
  const auto C = static_cast<std::size_t>(Q.cols);
  const auto [lo, hi] = std::minmax_element(Q.data.begin(), Q.data.end());
  const double range = std::max(*hi - *lo, 1e-300);
  const double eta = 0.5 / range;

  std::vector<double> x(R, 1.0 / static_cast<double>(R)), y(C, 1.0 / static_cast<double>(C));
  std::vector<double> cum_x(R, 0.0), cum_y(C, 0.0);  // cumulative payoff vectors
  std::vector<double> last_x(R, 0.0), last_y(C, 0.0);
  std::vector<double> avg_x(R, 0.0), avg_y(C, 0.0);
  std::vector<double> score_x(R), score_y(C);

  MwResult best{x, y, duality_gap(Q, x, y), 0};
  if (best.gap <= target_gap) return best;

  for (int t = 1; t <= budget; ++t) {
    // payoffs observed at the current iterate
    for (std::size_t a = 0; a < R; ++a) {
      double v = 0.0;
      for (std::size_t b = 0; b < C; ++b) v += Q.data[a * C + b] * y[b];
      last_x[a] = v;
      cum_x[a] += v;
    }
    for (std::size_t b = 0; b < C; ++b) {
      double v = 0.0;
      for (std::size_t a = 0; a < R; ++a) v += Q.data[a * C + b] * x[a];
      last_y[b] = -v;
      cum_y[b] -= v;
    }
    const double w = 1.0 / static_cast<double>(t);
    for (std::size_t a = 0; a < R; ++a) avg_x[a] += (x[a] - avg_x[a]) * w;
    for (std::size_t b = 0; b < C; ++b) avg_y[b] += (y[b] - avg_y[b]) * w;

    for (std::size_t a = 0; a < R; ++a) score_x[a] = cum_x[a] + last_x[a];
    for (std::size_t b = 0; b < C; ++b) score_y[b] = cum_y[b] + last_y[b];
    softmax(score_x, eta, x);
    softmax(score_y, eta, y);

    if (t % 32 == 0 || t == budget) {
      const double g_last = duality_gap(Q, x, y);
      if (g_last < best.gap) best = MwResult{x, y, g_last, t};
      const double g_avg = duality_gap(Q, avg_x, avg_y);
      if (g_avg < best.gap) best = MwResult{avg_x, avg_y, g_avg, t};
      if (best.gap <= target_gap) return best;
    }
  }
  best.iterations = budget;
  return best;
}

// Rows of G are linear deviation-gain functionals of the joint
// distribution; a feasible point satisfies G pi <= 0.
inline std::vector<double> solve_constraint_system(const Matrix& G, double tol, SolverMethod method, int budget,
                                                   int& iterations, bool& ok) {
  const auto n = static_cast<std::size_t>(G.cols);
  iterations = 0;
  // Uniform is returned whenever it is already feasible.
  std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  double worst = 0.0;
  for (int r = 0; r < G.rows; ++r) {
    double v = 0.0;
    for (std::size_t c = 0; c < n; ++c) v += G(r, static_cast<int>(c)) * uniform[c];
    worst = std::max(worst, v);
  }
  ok = true;
  if (G.rows == 0 || worst <= 1e-13) return uniform;

  if (method == SolverMethod::Simplex) {
    // minimize t  s.t.  G pi - t <= 0,  sum pi = 1,  pi, t >= 0
    lp::Problem p;
    p.num_vars = n + 1;
    p.objective.assign(n + 1, 0.0);
    p.objective.back() = -1.0;
    for (int r = 0; r < G.rows; ++r) {
      std::vector<double> row(n + 1);
      for (std::size_t c = 0; c < n; ++c) row[c] = G(r, static_cast<int>(c));
      row.back() = -1.0;
      p.add(std::move(row), lp::Sense::LessEq, 0.0);
    }
    std::vector<double> ones(n + 1, 1.0);
    ones.back() = 0.0;
    p.add(std::move(ones), lp::Sense::Equal, 1.0);
    auto sol = lp::solve(p, budget);
    iterations = sol.pivots;
    if (sol.status != lp::Status::Optimal) {
      ok = false;
      return uniform;
    }
    std::vector<double> pi(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    clean_distribution(pi);
    return pi;
  }
  // Constraint player (rows, maximizing violation) against pi (columns).
  auto res = multiplicative_weights(G, tol, budget);
  iterations = res.iterations;
  return res.y;
}

}  // namespace detail

inline ZeroSumSolution solve_zero_sum_nash(const Matrix& Q, double tol = kDefaultSolverTol,
                                           SolverMethod method = SolverMethod::Simplex, int budget = -1) {
  if (Q.rows <= 0 || Q.cols <= 0) throw std::invalid_argument("solve_zero_sum_nash: empty matrix");
  detail::require_finite(Q.data, "solve_zero_sum_nash");
  ZeroSumSolution out;
  auto& cert = out.certificate;
  if (method == SolverMethod::Simplex) {
    const auto row = detail::max_player_lp(Q);
    const auto col = detail::max_player_lp(Q.transposed().negated());
    cert.iterations_used = row.pivots + col.pivots;
    if (row.status != lp::Status::Optimal || col.status != lp::Status::Optimal) {
      throw SolverError("solve_zero_sum_nash: simplex did not reach an optimal basis");
    }
    out.mu.assign(row.x.begin(), row.x.begin() + Q.rows);
    out.nu.assign(col.x.begin(), col.x.begin() + Q.cols);
  } else {
    auto res = detail::multiplicative_weights(Q, tol, budget > 0 ? budget : 2'000'000);
    out.mu = std::move(res.x);
    out.nu = std::move(res.y);
    cert.iterations_used = res.iterations;
  }
  detail::clean_distribution(out.mu);
  detail::clean_distribution(out.nu);
  out.value = bilinear(Q, out.mu, out.nu);
  cert.duality_gap = std::max(0.0, duality_gap(Q, out.mu, out.nu));
  cert.max_constraint_residual = cert.duality_gap;
  cert.marginals = {out.mu, out.nu};
  cert.joint_dist.resize(static_cast<std::size_t>(Q.rows * Q.cols));
  for (int a = 0; a < Q.rows; ++a)
    for (int b = 0; b < Q.cols; ++b)
      cert.joint_dist[static_cast<std::size_t>(a * Q.cols + b)] = out.mu[static_cast<std::size_t>(a)] * out.nu[static_cast<std::size_t>(b)];
  cert.converged = cert.duality_gap <= tol;
  return out;
}

// Constraint rows of the two-sided CCE used by optimistic Nash value
// iteration: the max-player cannot raise E[Q_up], the min-player cannot
// lower E[Q_low].
inline Matrix cce_pair_constraints(const Matrix& Q_up, const Matrix& Q_low) {
  const int A = Q_up.rows;
  const int B = Q_up.cols;
  Matrix G(A + B, A * B);
  for (int dev = 0; dev < A; ++dev)
    for (int a = 0; a < A; ++a)
      for (int b = 0; b < B; ++b) G(dev, a * B + b) = Q_up(dev, b) - Q_up(a, b);
  for (int dev = 0; dev < B; ++dev)
    for (int a = 0; a < A; ++a)
      for (int b = 0; b < B; ++b) G(A + dev, a * B + b) = Q_low(a, b) - Q_low(a, dev);
  return G;
}

inline Matrix cce_constraints(const TensorGame& g) {
  const auto& sp = g.actions;
  int rows = 0;
  for (int i = 0; i < g.num_players(); ++i) rows += sp.count(i);
  Matrix G(rows, static_cast<int>(sp.size()));
  int r = 0;
  for (int i = 0; i < g.num_players(); ++i) {
    const auto& Qi = g.payoffs[static_cast<std::size_t>(i)];
    for (int dev = 0; dev < sp.count(i); ++dev, ++r)
      for (std::size_t j = 0; j < sp.size(); ++j) G(r, static_cast<int>(j)) = Qi[sp.with_action(j, i, dev)] - Qi[j];
  }
  return G;
}

inline Matrix ce_constraints(const TensorGame& g) {
  const auto& sp = g.actions;
  int rows = 0;
  for (int i = 0; i < g.num_players(); ++i) rows += sp.count(i) * (sp.count(i) - 1);
  Matrix G(rows, static_cast<int>(sp.size()));
  int r = 0;
  for (int i = 0; i < g.num_players(); ++i) {
    const auto& Qi = g.payoffs[static_cast<std::size_t>(i)];
    for (int rec = 0; rec < sp.count(i); ++rec) {
      for (int sub = 0; sub < sp.count(i); ++sub) {
        if (sub == rec) continue;
        for (std::size_t j = 0; j < sp.size(); ++j)
          if (sp.action_of(j, i) == rec) G(r, static_cast<int>(j)) = Qi[sp.with_action(j, i, sub)] - Qi[j];
        ++r;
      }
    }
  }
  return G;
}

namespace detail {

inline EquilibriumCertificate finish_certificate(std::vector<double> pi, const JointActionSpace& sp, double residual,
                                                 int iterations, bool ok, double tol) {
  EquilibriumCertificate cert;
  for (int i = 0; i < sp.num_players(); ++i) {
    std::vector<double> m(static_cast<std::size_t>(sp.count(i)), 0.0);
    for (std::size_t j = 0; j < pi.size(); ++j) m[static_cast<std::size_t>(sp.action_of(j, i))] += pi[j];
    cert.marginals.push_back(std::move(m));
  }
  cert.joint_dist = std::move(pi);
  cert.max_constraint_residual = residual;
  cert.iterations_used = iterations;
  cert.converged = ok && residual <= tol;
  return cert;
}

inline void require_same_shape(const TensorGame& g) {
  if (g.payoffs.size() != static_cast<std::size_t>(g.num_players())) throw std::invalid_argument("one payoff tensor per player required");
  for (const auto& t : g.payoffs) {
    if (t.size() != g.actions.size()) throw std::invalid_argument("payoff tensor shape does not match joint action space");
    require_finite(t, "equilibrium solver");
  }
}

}  // namespace detail

inline EquilibriumCertificate find_cce_pair(const Matrix& Q_up, const Matrix& Q_low, double tol = kDefaultSolverTol,
                                            SolverMethod method = SolverMethod::Simplex, int budget = -1) {
  if (Q_up.rows != Q_low.rows || Q_up.cols != Q_low.cols) throw std::invalid_argument("find_cce_pair: shape mismatch");
  detail::require_finite(Q_up.data, "find_cce_pair");
  detail::require_finite(Q_low.data, "find_cce_pair");
  int iters = 0;
  bool ok = true;
  auto pi = detail::solve_constraint_system(cce_pair_constraints(Q_up, Q_low), tol, method,
                                            budget > 0 ? budget : (method == SolverMethod::Simplex ? 10000 : 2'000'000),
                                            iters, ok);
  const double res = cce_pair_residual(Q_up, Q_low, pi);
  return detail::finish_certificate(std::move(pi), JointActionSpace({Q_up.rows, Q_up.cols}), res, iters, ok, tol);
}

inline EquilibriumCertificate find_cce_general(const TensorGame& g, double tol = kDefaultSolverTol,
                                               SolverMethod method = SolverMethod::Simplex, int budget = -1) {
  detail::require_same_shape(g);
  int iters = 0;
  bool ok = true;
  auto pi = detail::solve_constraint_system(cce_constraints(g), tol, method,
                                            budget > 0 ? budget : (method == SolverMethod::Simplex ? 10000 : 2'000'000),
                                            iters, ok);
  const double res = cce_residual(g, pi);
  return detail::finish_certificate(std::move(pi), g.actions, res, iters, ok, tol);
}

inline EquilibriumCertificate find_ce_general(const TensorGame& g, double tol = kDefaultSolverTol,
                                              SolverMethod method = SolverMethod::Simplex, int budget = -1) {
  detail::require_same_shape(g);
  int iters = 0;
  bool ok = true;
  auto pi = detail::solve_constraint_system(ce_constraints(g), tol, method,
                                            budget > 0 ? budget : (method == SolverMethod::Simplex ? 10000 : 2'000'000),
                                            iters, ok);
  const double res = ce_residual(g, pi);
  return detail::finish_certificate(std::move(pi), g.actions, res, iters, ok, tol);
}

inline constexpr int kTinyNashMaxActions = 4;

namespace detail {

// Strategy y of the opponent (supported in `own`) that makes every action
// in `target` a best response for the player with payoff matrix M
// (rows = that player's actions, cols = opponent actions).
inline bool support_feasible(const Matrix& M, const std::vector<int>& target, const std::vector<int>& own,
                             std::vector<double>& y) {
  const double mmin = *std::min_element(M.data.begin(), M.data.end());
  const std::size_t n = own.size();
  lp::Problem p;
  p.num_vars = n + 1;  // y restricted to `own`, plus shifted best-response value u
  for (int r = 0; r < M.rows; ++r) {
    std::vector<double> row(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) row[k] = M(r, own[k]) - mmin;
    row.back() = -1.0;
    const bool in_target = std::find(target.begin(), target.end(), r) != target.end();
    p.add(std::move(row), in_target ? lp::Sense::Equal : lp::Sense::LessEq, 0.0);
  }
  std::vector<double> ones(n + 1, 1.0);
  ones.back() = 0.0;
  p.add(std::move(ones), lp::Sense::Equal, 1.0);
  const auto sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) return false;
  y.assign(static_cast<std::size_t>(M.cols), 0.0);
  for (std::size_t k = 0; k < n; ++k) y[static_cast<std::size_t>(own[k])] = sol.x[k];
  clean_distribution(y);
  return true;
}

// Non-empty subsets of {0..n-1}, ordered by size then lexicographically.
inline std::vector<std::vector<int>> supports(int n) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (int k = 0; k < n; ++k)
      if (mask & (1u << k)) s.push_back(k);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return l.size() != r.size() ? l.size() < r.size() : l < r;
  });
  return out;
}

}  // namespace detail

// Nash equilibrium of a one- or two-player game with at most four actions
// per player, by support enumeration. Support pairs are tried in order of
// total size, then lexicographically, and the first pair passing the
// deviation check is returned.
inline EquilibriumCertificate find_nash_tiny(const TensorGame& g, double tol = kDefaultSolverTol) {
  detail::require_same_shape(g);
  const int m = g.num_players();
  if (m > 2) throw std::invalid_argument("find_nash_tiny: at most two players supported");
  for (int i = 0; i < m; ++i)
    if (g.actions.count(i) > kTinyNashMaxActions) throw std::invalid_argument("find_nash_tiny: at most four actions per player");

  if (m == 1) {
    const auto& q = g.payoffs[0];
    const auto best = static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
    std::vector<double> pi(q.size(), 0.0);
    pi[best] = 1.0;
    const double res = nash_residual(g, {pi});
    return detail::finish_certificate(std::move(pi), g.actions, res, 0, true, tol);
  }

  const int A = g.actions.count(0);
  const int B = g.actions.count(1);
  Matrix P1(A, B, g.payoffs[0]);                    // rows: player 1 actions
  Matrix P2 = Matrix(A, B, g.payoffs[1]).transposed();  // rows: player 2 actions
  const auto sup_a = detail::supports(A);
  const auto sup_b = detail::supports(B);
  int tried = 0;
  for (std::size_t total = 2; total <= static_cast<std::size_t>(A + B); ++total) {
    for (const auto& I : sup_a) {
      if (I.size() >= total) continue;
      for (const auto& J : sup_b) {
        if (I.size() + J.size() != total) continue;
        ++tried;
        std::vector<double> x, y;
        if (!detail::support_feasible(P1, I, J, y)) continue;  // y makes I best responses
        if (!detail::support_feasible(P2, J, I, x)) continue;  // x makes J best responses
        std::vector<std::vector<double>> marg{x, y};
        const double res = nash_residual(g, marg);
        if (res > tol) continue;
        std::vector<double> pi(static_cast<std::size_t>(A * B));
        for (int a = 0; a < A; ++a)
          for (int b = 0; b < B; ++b) pi[static_cast<std::size_t>(a * B + b)] = x[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(b)];
        auto cert = detail::finish_certificate(std::move(pi), g.actions, res, tried, true, tol);
        cert.marginals = std::move(marg);
        return cert;
      }
    }
  }
  throw SolverError("find_nash_tiny: no support pair passed the deviation check (arithmetic failure)");
}

enum class EquilibriumKind { Nash, CE, CCE };

inline const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Nash: return "nash";
    case EquilibriumKind::CE: return "ce";
    case EquilibriumKind::CCE: return "cce";
  }
  return "?";
}

// One-step equilibrium of the requested kind; Nash only for tiny games.
inline EquilibriumCertificate find_equilibrium(const TensorGame& g, EquilibriumKind kind, double tol = kDefaultSolverTol) {
  switch (kind) {
    case EquilibriumKind::Nash: return find_nash_tiny(g, tol);
    case EquilibriumKind::CE: return find_ce_general(g, tol);
    case EquilibriumKind::CCE: return find_cce_general(g, tol);
  }
  throw std::invalid_argument("find_equilibrium: unknown kind");
}

}  // namespace nashvi
