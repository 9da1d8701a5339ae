#include <gtest/gtest.h>

#include <cmath>

#include "iabplan/branch_and_bound.hpp"
#include "iabplan/lp_simplex.hpp"

using namespace iab;

namespace {

lp::Problem two_var(double c0, double c1) {
  lp::Problem p;
  p.num_cols = 2;
  p.cost = {c0, c1};
  p.lower = {0.0, 0.0};
  p.upper = {HUGE_VAL, HUGE_VAL};
  return p;
}

}  // namespace

TEST(DualSimplex, SmallMinimization) {
  // min x + y  s.t. x + 2y >= 4, 3x + y >= 6
  auto p = two_var(1.0, 1.0);
  p.rows.push_back({{{0, 1.0}, {1, 2.0}}, lp::RowSense::GreaterEqual, 4.0});
  p.rows.push_back({{{0, 3.0}, {1, 1.0}}, lp::RowSense::GreaterEqual, 6.0});
  lp::DualSimplex s(p);
  ASSERT_EQ(s.solve(), lp::Status::Optimal);
  EXPECT_NEAR(s.objective(), 2.8, 1e-7);
  const auto x = s.primal();
  EXPECT_NEAR(x[0], 1.6, 1e-7);
  EXPECT_NEAR(x[1], 1.2, 1e-7);
}

TEST(DualSimplex, EqualityAndBounds) {
  // min -x - y  s.t. x + y = 3, x <= 1
  auto p = two_var(-1.0, -2.0);
  p.upper = {1.0, HUGE_VAL};
  p.rows.push_back({{{0, 1.0}, {1, 1.0}}, lp::RowSense::Equal, 3.0});
  lp::DualSimplex s(p);
  ASSERT_EQ(s.solve(), lp::Status::Optimal);
  EXPECT_NEAR(s.objective(), -6.0, 1e-7);
}

TEST(DualSimplex, DetectsInfeasibility) {
  auto p = two_var(1.0, 1.0);
  p.upper = {1.0, 1.0};
  p.rows.push_back({{{0, 1.0}, {1, 1.0}}, lp::RowSense::GreaterEqual, 3.0});
  lp::DualSimplex s(p);
  EXPECT_EQ(s.solve(), lp::Status::Infeasible);
}

TEST(DualSimplex, BoundChangesResolve) {
  auto p = two_var(1.0, 1.0);
  p.upper = {5.0, 5.0};
  p.rows.push_back({{{0, 1.0}, {1, 1.0}}, lp::RowSense::GreaterEqual, 2.5});
  lp::DualSimplex s(p);
  ASSERT_EQ(s.solve(), lp::Status::Optimal);
  EXPECT_NEAR(s.objective(), 2.5, 1e-7);
  s.set_bounds(0, 0.0, 0.0);
  s.set_bounds(1, 0.0, 2.0);
  EXPECT_EQ(s.solve(), lp::Status::Infeasible);
  s.set_bounds(1, 0.0, 5.0);
  ASSERT_EQ(s.solve(), lp::Status::Optimal);
  EXPECT_NEAR(s.primal()[1], 2.5, 1e-7);
}

TEST(BranchAndBound, SmallKnapsackCover) {
  // min 3a + 2b + 4c  s.t. 2a + b + 3c >= 4, binaries -> a + c (7) or b + c (6)
  lp::Problem p;
  p.num_cols = 3;
  p.cost = {3.0, 2.0, 4.0};
  p.lower = {0.0, 0.0, 0.0};
  p.upper = {1.0, 1.0, 1.0};
  p.rows.push_back({{{0, 2.0}, {1, 1.0}, {2, 3.0}}, lp::RowSense::GreaterEqual, 4.0});
  bnb::Solver solver(p, {true, true, true});
  bnb::Options opt;
  opt.time_limit_s = 10.0;
  const auto r = solver.run(opt);
  ASSERT_EQ(r.status, bnb::Status::Optimal);
  EXPECT_NEAR(r.objective, 6.0, 1e-9);
  EXPECT_NEAR(r.x[1], 1.0, 1e-9);
  EXPECT_NEAR(r.x[2], 1.0, 1e-9);
  EXPECT_EQ(r.gap, 0.0);
}

TEST(BranchAndBound, InfeasibleInteger) {
  // 2a = 1 has no binary solution.
  lp::Problem p;
  p.num_cols = 1;
  p.cost = {1.0};
  p.lower = {0.0};
  p.upper = {1.0};
  p.rows.push_back({{{0, 2.0}}, lp::RowSense::Equal, 1.0});
  bnb::Solver solver(p, {true});
  EXPECT_EQ(solver.run({}).status, bnb::Status::Infeasible);
}
