#include <gtest/gtest.h>

#include "helpers.hpp"
#include "iabplan/experiment.hpp"
#include "iabplan/oracle.hpp"
#include "iabplan/solve.hpp"
#include "iabplan/validate.hpp"

using namespace iab;

namespace {

ModelParams params(int R, int D = 3, int delta = 4, bool airtime = true) {
  ModelParams p;
  p.redundancy = R;
  p.max_depth = D;
  p.max_out_degree = delta;
  p.airtime_per_node = airtime;
  return p;
}

SolveLimits limits(double t = 60.0) {
  SolveLimits l;
  l.time_limit_s = t;
  return l;
}

ScenarioGraph ring(int n) {
  auto g = testutil::nodes(n);
  for (int i = 0; i < n; ++i) testutil::link(g, i, (i + 1) % n);
  return g;
}

ScenarioGraph small_instance(std::uint64_t seed, int n) {
  InstanceOptions o;
  o.n = n;
  o.seed = seed;
  o.drop_isolated = false;
  return make_instance(o);
}

}  // namespace

TEST(Oracle, TwoNodes) {
  const auto g = testutil::complete(2);
  EXPECT_EQ(brute_force_min_donors(g, params(1)).donors, 1);
  EXPECT_EQ(brute_force_min_donors(g, params(2)).donors, 2);
}

TEST(Oracle, WitnessValidates) {
  for (int R : {1, 2}) {
    const auto g = ring(5);
    const auto p = params(R, 2, 3);
    const auto r = brute_force_min_donors(g, p);
    const auto rep = validate_solution(g, p, r.witness);
    EXPECT_TRUE(rep.ok()) << rep.summary();
    EXPECT_EQ(r.witness.objective, r.donors);
  }
}

TEST(Oracle, SizeGuard) {
  EXPECT_THROW(brute_force_min_donors(testutil::complete(9), params(1)), ParameterError);
}

TEST(Oracle, RingMatchesExact) {
  const auto g = ring(5);
  const auto p = params(1, 2, 2);
  const auto o = brute_force_min_donors(g, p);
  EXPECT_EQ(o.donors, 2);  // chains of at most three nodes
  const auto s = solve_exact(build_model(g, p), limits());
  EXPECT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_EQ(s.objective, o.donors);
  EXPECT_DOUBLE_EQ(donor_ratio(s, g), o.donors / 5.0);
}

TEST(Oracle, CapacityLimitsTreeSize) {
  // No link can carry the demand of two downstream nodes.
  auto g = testutil::nodes(4, 600.0);
  testutil::link(g, 0, 1, 1000.0);
  testutil::link(g, 1, 2, 1000.0);
  testutil::link(g, 2, 3, 1000.0);
  const auto p = params(1, 3, 4, false);
  const auto o = brute_force_min_donors(g, p);
  EXPECT_EQ(o.donors, 2);
  EXPECT_EQ(solve_exact(build_model(g, p), limits()).objective, 2.0);
}

TEST(SolveExact, MatchesOracleOnSmallInstances) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto g = small_instance(seed, 5);
    for (int R : {1, 2}) {
      const auto p = params(R, 3, 4, false);
      const auto s = solve_exact(build_model(g, p), limits());
      ASSERT_TRUE(s.has_plan());
      EXPECT_EQ(s.objective, brute_force_min_donors(g, p).donors) << "seed " << seed << " R " << R;
      const auto rep = validate_solution(g, p, s);
      EXPECT_TRUE(rep.ok()) << rep.summary();
    }
  }
}

TEST(SolveExact, ReturnedPlansValidate) {
  const auto g = small_instance(11, 8);
  for (int R : {1, 2}) {
    const auto p = params(R);
    const auto s = solve_exact(build_model(g, p), limits(30.0));
    ASSERT_TRUE(s.has_plan());
    const auto rep = validate_solution(g, p, s);
    EXPECT_TRUE(rep.ok()) << rep.summary();
  }
}

TEST(SolveExact, Deterministic) {
  const auto g = small_instance(3, 6);
  const auto m = build_model(g, params(2));
  SolveLimits l = limits();
  l.node_limit = 200;
  const auto a = solve_exact(m, l);
  const auto b = solve_exact(m, l);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.donor_set, b.donor_set);
  EXPECT_EQ(a.active_edges, b.active_edges);
  EXPECT_EQ(a.flows, b.flows);
}

TEST(SolveExact, GapStatusConsistency) {
  const auto g = small_instance(5, 8);
  SolveLimits l = limits();
  l.node_limit = 1;
  const auto s = solve_exact(build_model(g, params(2)), l);
  ASSERT_TRUE(s.has_plan());
  if (s.status == SolveStatus::Optimal) {
    EXPECT_EQ(s.gap, 0.0);
  } else {
    EXPECT_EQ(s.status, SolveStatus::FeasibleGap);
    EXPECT_GT(s.gap, 0.0);
    EXPECT_LE((s.objective - s.lower_bound) / s.objective, s.gap + 1e-9);
  }
  EXPECT_LE(s.lower_bound, s.objective + 1e-9);
}

TEST(SolveExact, OverloadedLinkForcesDonors) {
  auto g = testutil::nodes(2, 800.0);
  testutil::link(g, 0, 1, 100.0);
  const auto s = solve_exact(build_model(g, params(1)), limits());
  EXPECT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_EQ(s.objective, 2.0);
}

TEST(SolveExact, InfeasibleModel) {
  auto m = build_model(testutil::complete(2), params(1));
  detail::add_row(m, "contradiction", {0}, {{m.u(0, 0, 1), 1.0}, {m.u(1, 0, 1), 1.0}}, Sense::GreaterEqual, 3.0);
  const auto s = solve_exact(m, limits());
  EXPECT_EQ(s.status, SolveStatus::Infeasible);
  EXPECT_FALSE(s.has_plan());
}

TEST(SolveExact, ContradictoryBounds) {
  auto m = build_model(testutil::complete(2), params(1));
  detail::add_row(m, "contradiction", {0}, {{m.u(0, 0, 1), 1.0}}, Sense::GreaterEqual, 2.0);
  EXPECT_EQ(solve_exact(m, limits()).status, SolveStatus::Infeasible);
}

TEST(SolveExact, EmptyGraphHasNoRatio) {
  EXPECT_THROW(donor_ratio(Solution{}, ScenarioGraph{}), ParameterError);
}

TEST(DonorRatio, Values) {
  Solution s;
  s.objective = 3.0;
  EXPECT_NEAR(donor_ratio(s, 18), 0.1667, 1e-4);
  s.objective = 18.0;
  EXPECT_DOUBLE_EQ(donor_ratio(s, 18), 1.0);
}

TEST(LimitsValidation, RejectsNonPositiveTime) {
  SolveLimits l;
  l.time_limit_s = 0.0;
  EXPECT_THROW(l.validate(), ParameterError);
}
