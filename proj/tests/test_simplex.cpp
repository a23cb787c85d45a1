#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "nashvi/simplex.hpp"

using namespace nashvi::lp;

TEST(Simplex, TextbookMaximization) {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
  Problem p;
  p.num_vars = 2;
  p.objective = {3, 5};
  p.add({1, 0}, Sense::LessEq, 4);
  p.add({0, 2}, Sense::LessEq, 12);
  p.add({3, 2}, Sense::LessEq, 18);
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, 36.0, 1e-12);
  EXPECT_NEAR(s.x[0], 2.0, 1e-12);
  EXPECT_NEAR(s.x[1], 6.0, 1e-12);
}

TEST(Simplex, EqualityAndGreaterEqualRows) {
  // max -x - y, x + y = 1, x >= 0.3 -> objective -1
  Problem p;
  p.num_vars = 2;
  p.objective = {-1, -1};
  p.add({1, 1}, Sense::Equal, 1);
  p.add({1, 0}, Sense::GreaterEq, 0.3);
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, -1.0, 1e-12);
  EXPECT_GE(s.x[0], 0.3 - 1e-12);
  EXPECT_NEAR(s.x[0] + s.x[1], 1.0, 1e-12);
}

TEST(Simplex, DetectsInfeasible) {
  Problem p;
  p.num_vars = 1;
  p.add({1}, Sense::LessEq, 1);
  p.add({1}, Sense::GreaterEq, 2);
  EXPECT_EQ(solve(p).status, Status::Infeasible);
}

TEST(Simplex, DetectsUnbounded) {
  Problem p;
  p.num_vars = 2;
  p.objective = {1, 0};
  p.add({1, -1}, Sense::LessEq, 1);
  EXPECT_EQ(solve(p).status, Status::Unbounded);
}

TEST(Simplex, NegativeRightHandSide) {
  // -x <= -2 means x >= 2; min x -> 2
  Problem p;
  p.num_vars = 1;
  p.objective = {-1};
  p.add({-1}, Sense::LessEq, -2);
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.x[0], 2.0, 1e-12);
}

TEST(Simplex, PureFeasibilityOnSimplex) {
  Problem p;
  p.num_vars = 3;
  p.add({1, 1, 1}, Sense::Equal, 1);
  p.add({1, -1, 0}, Sense::LessEq, 0);
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.x[0] + s.x[1] + s.x[2], 1.0, 1e-12);
  EXPECT_LE(s.x[0] - s.x[1], 1e-12);
}

// Random feasible LPs: a known interior point certifies feasibility, and
// the returned point must satisfy every row.
TEST(Simplex, RandomProblemsProduceFeasibleOptima) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
    const std::size_t m = 1 + static_cast<std::size_t>(trial % 7);
    std::vector<double> x0(n);
    for (auto& v : x0) v = 0.5 * (U(rng) + 1.0);
    Problem p;
    p.num_vars = n;
    p.objective.resize(n);
    for (auto& c : p.objective) c = U(rng);
    for (std::size_t r = 0; r < m; ++r) {
      std::vector<double> a(n);
      double ax = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        a[k] = U(rng);
        ax += a[k] * x0[k];
      }
      p.add(a, Sense::LessEq, ax + 0.1);
    }
    std::vector<double> box(n, 1.0);
    p.add(box, Sense::LessEq, static_cast<double>(n));
    const auto s = solve(p);
    ASSERT_EQ(s.status, Status::Optimal) << trial;
    double obj = 0.0;
    double obj0 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_GE(s.x[k], -1e-12);
      obj += p.objective[k] * s.x[k];
      obj0 += p.objective[k] * x0[k];
    }
    for (const auto& row : p.rows) {
      double lhs = 0.0;
      for (std::size_t k = 0; k < n; ++k) lhs += row.coef[k] * s.x[k];
      EXPECT_LE(lhs, row.rhs + 1e-9) << trial;
    }
    EXPECT_NEAR(obj, s.objective, 1e-9);
    EXPECT_GE(obj, obj0 - 1e-9);  // at least as good as the known feasible point
  }
}

TEST(Simplex, DegenerateProblemTerminates) {
  // Many constraints tight at the origin.
  Problem p;
  p.num_vars = 4;
  p.objective = {1, 1, 1, 1};
  for (int r = 0; r < 12; ++r) {
    std::vector<double> a(4);
    for (int k = 0; k < 4; ++k) a[static_cast<std::size_t>(k)] = ((r + k) % 3) - 1.0;
    p.add(a, Sense::LessEq, 0.0);
  }
  p.add({1, 1, 1, 1}, Sense::LessEq, 1.0);
  const auto s = solve(p);
  EXPECT_NE(s.status, Status::IterationLimit);
}
