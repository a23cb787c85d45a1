#pragma once

// Dense two-phase tableau simplex for the small LPs that arise in one-step
// equilibrium computation (a few dozen rows and columns at most).
//
//   maximize  c^T x   subject to   rows (<=, =, >=),   x >= 0
//
// Dantzig pricing with a Bland fallback on degenerate stalls; the final
// basic solution is recomputed from the original data.

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <limits>
#include <vector>

namespace nashvi::lp {

enum class Sense { LessEq, Equal, GreaterEq };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Constraint {
  std::vector<double> coef;
  Sense sense = Sense::LessEq;
  double rhs = 0.0;
};

struct Problem {
  std::size_t num_vars = 0;
  std::vector<double> objective;  // maximized; empty means pure feasibility
  std::vector<Constraint> rows;

  void add(std::vector<double> coef, Sense sense, double rhs) {
    rows.push_back(Constraint{std::move(coef), sense, rhs});
  }
};

struct Solution {
  Status status = Status::IterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  int pivots = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  [[nodiscard]] double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  // Row `rows_` is the objective row (reduced costs, negated convention),
  // column `cols_` is the right-hand side.
  double& obj(std::size_t c) { return at(rows_, c); }
  double& rhs(std::size_t r) { return at(r, cols_); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

inline constexpr double kPivotEps = 1e-9;
inline constexpr double kCostEps = 1e-11;
inline constexpr int kDegenerateRunBeforeBland = 50;

// Runs simplex iterations on a tableau whose objective row holds
// (z_j - c_j) for a maximization problem. Columns flagged in `blocked`
// never enter the basis. Pricing is Dantzig's rule with ratio-test ties
// broken toward the largest pivot; after a long run of degenerate pivots
// Bland's rule takes over until progress resumes, which rules out cycling.
inline Status iterate(Tableau& t, std::vector<std::size_t>& basis, const std::vector<bool>& blocked, int& pivots,
                      int max_pivots) {
  int degenerate_run = 0;
  while (true) {
    const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
    std::size_t enter = t.cols();
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (blocked[c] || t.obj(c) >= -kCostEps) continue;
      if (enter == t.cols() || (!bland && t.obj(c) < t.obj(enter))) enter = c;
      if (bland) break;
    }
    if (enter == t.cols()) return Status::Optimal;

    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a > kPivotEps) best_ratio = std::min(best_ratio, std::max(0.0, t.rhs(r)) / a);
    }
    std::size_t leave = t.rows();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kPivotEps || std::max(0.0, t.rhs(r)) / a > best_ratio + 1e-12) continue;
      if (leave == t.rows()) {
        leave = r;
      } else if (bland ? basis[r] < basis[leave] : a > t.at(leave, enter)) {
        leave = r;
      }
    }
    if (leave == t.rows()) return Status::Unbounded;
    if (pivots >= max_pivots) return Status::IterationLimit;
    degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
    t.pivot(leave, enter);
    basis[leave] = enter;
    ++pivots;
  }
}

// Solves B x = b for the basis columns of the original constraint matrix
// with partial pivoting. Returns false if B is numerically singular.
inline bool solve_basis(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                        const std::vector<std::size_t>& basis, std::vector<double>& xb) {
  const std::size_t m = b.size();
  std::vector<std::vector<double>> M(m, std::vector<double>(m + 1));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = 0; k < m; ++k) M[r][k] = A[r][basis[k]];
    M[r][m] = b[r];
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
    if (std::abs(M[piv][col]) < 1e-14) return false;
    std::swap(M[piv], M[col]);
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = M[r][col] / M[col][col];
      if (f == 0.0) continue;
      for (std::size_t k = col; k <= m; ++k) M[r][k] -= f * M[col][k];
    }
  }
  xb.assign(m, 0.0);
  for (std::size_t r = m; r-- > 0;) {
    double v = M[r][m];
    for (std::size_t k = r + 1; k < m; ++k) v -= M[r][k] * xb[k];
    xb[r] = v / M[r][r];
  }
  return true;
}

}  // namespace detail

inline Solution solve(const Problem& p, int max_pivots = 10000) {
  const std::size_t m = p.rows.size();
  const std::size_t n = p.num_vars;

  // Column layout: [original n | slack/surplus per inequality row | artificial per row needing one]
  std::vector<double> sign(m, 1.0);
  std::vector<Sense> sense(m);
  std::size_t num_slack = 0;
  std::size_t num_art = 0;
  for (std::size_t r = 0; r < m; ++r) {
    sense[r] = p.rows[r].sense;
    if (p.rows[r].rhs < 0.0) {
      sign[r] = -1.0;
      if (sense[r] == Sense::LessEq) sense[r] = Sense::GreaterEq;
      else if (sense[r] == Sense::GreaterEq) sense[r] = Sense::LessEq;
    }
    if (sense[r] != Sense::Equal) ++num_slack;
    if (sense[r] != Sense::LessEq) ++num_art;
  }
  const std::size_t cols = n + num_slack + num_art;
  detail::Tableau t(m, cols);
  std::vector<std::size_t> basis(m);
  std::vector<bool> is_art(cols, false);

  std::size_t next_slack = n;
  std::size_t next_art = n + num_slack;
  for (std::size_t r = 0; r < m; ++r) {
    const auto& row = p.rows[r];
    for (std::size_t c = 0; c < n && c < row.coef.size(); ++c) t.at(r, c) = sign[r] * row.coef[c];
    t.rhs(r) = sign[r] * row.rhs;
    if (sense[r] == Sense::LessEq) {
      t.at(r, next_slack) = 1.0;
      basis[r] = next_slack++;
    } else {
      if (sense[r] == Sense::GreaterEq) t.at(r, next_slack++) = -1.0;
      t.at(r, next_art) = 1.0;
      is_art[next_art] = true;
      basis[r] = next_art++;
    }
  }

  std::vector<std::vector<double>> original(m, std::vector<double>(cols));
  std::vector<double> original_rhs(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < cols; ++c) original[r][c] = t.at(r, c);
    original_rhs[r] = t.rhs(r);
  }

  Solution sol;
  std::vector<bool> blocked(cols, false);

  // Phase 1: maximize -sum(artificials).
  if (num_art > 0) {
    for (std::size_t c = 0; c <= cols; ++c) t.obj(c) = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_art[basis[r]]) continue;
      for (std::size_t c = 0; c <= cols; ++c) {
        if (!is_art[c] || c == cols) t.obj(c) -= t.at(r, c);
      }
    }
    const Status st = detail::iterate(t, basis, blocked, sol.pivots, max_pivots);
    if (st == Status::IterationLimit) {
      sol.status = st;
      return sol;
    }
    double infeas = 0.0;
    for (std::size_t r = 0; r < m; ++r)
      if (is_art[basis[r]]) infeas += t.rhs(r);
    if (infeas > 1e-9) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_art[basis[r]]) continue;
      std::size_t best = cols;
      for (std::size_t c = 0; c < n + num_slack; ++c) {
        if (std::abs(t.at(r, c)) > detail::kPivotEps && (best == cols || std::abs(t.at(r, c)) > std::abs(t.at(r, best)))) best = c;
      }
      if (best != cols) {
        t.pivot(r, best);
        basis[r] = best;
        ++sol.pivots;
      }
    }
    for (std::size_t c = 0; c < cols; ++c) blocked[c] = is_art[c];
  }

  // Phase 2 objective row: z_j - c_j expressed in the current basis.
  for (std::size_t c = 0; c <= cols; ++c) t.obj(c) = 0.0;
  for (std::size_t c = 0; c < n && c < p.objective.size(); ++c) t.obj(c) = -p.objective[c];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = basis[r];
    const double cb = (b < n && b < p.objective.size()) ? p.objective[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) t.obj(c) += cb * t.at(r, c);
  }
  const Status st = detail::iterate(t, basis, blocked, sol.pivots, max_pivots);
  sol.status = st;
  // Recompute the basic solution from the original data so round-off
  // accumulated across pivots does not leak into the answer.
  std::vector<double> xb;
  if (!detail::solve_basis(original, original_rhs, basis, xb)) {
    xb.resize(m);
    for (std::size_t r = 0; r < m; ++r) xb[r] = t.rhs(r);
  }
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) sol.x[basis[r]] = std::max(0.0, xb[r]);
  }
  sol.objective = 0.0;
  for (std::size_t c = 0; c < n && c < p.objective.size(); ++c) sol.objective += p.objective[c] * sol.x[c];
  return sol;
}

}  // namespace nashvi::lp
