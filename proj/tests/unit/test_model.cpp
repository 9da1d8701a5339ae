#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "iabplan/model.hpp"
#include "iabplan/solve.hpp"

using namespace iab;

namespace {

ModelParams params(int R, bool flow, int D = 3, int delta = 4) {
  ModelParams p;
  p.redundancy = R;
  p.flow_enabled = flow;
  p.max_depth = D;
  p.max_out_degree = delta;
  return p;
}

SolveLimits quick() {
  SolveLimits l;
  l.time_limit_s = 60.0;
  return l;
}

}  // namespace

TEST(BuildModel, UVariableCount) {
  const auto g = testutil::complete(18);
  const auto m = build_model(g, params(2, false));
  EXPECT_EQ(m.count(VarKind::U), 144u);
  EXPECT_EQ(m.count(VarKind::P), g.edges.size() * 2);
  EXPECT_EQ(m.count(VarKind::F), 0u);
  EXPECT_EQ(m.count(VarKind::A), 0u);
}

TEST(BuildModel, FlowVariableCounts) {
  const auto g = testutil::complete(5);
  const auto m = build_model(g, params(2, true));
  EXPECT_EQ(m.count(VarKind::U), 5u * 4u * 2u);
  EXPECT_EQ(m.count(VarKind::F), g.edges.size() * 5u * 2u);
  EXPECT_EQ(m.count(VarKind::A), g.edges.size());
}

TEST(BuildModel, TopologyFamiliesOnly) {
  const auto m = build_model(testutil::complete(4), params(1, false));
  const std::vector<std::string> want{"rdist", "rsingleroot", "rdonor", "rdeg", "rpath", "rexist", "rdir"};
  auto got = m.families();
  EXPECT_EQ(got.size(), 7u);
  for (const auto& f : want) EXPECT_NE(std::find(got.begin(), got.end(), f), got.end()) << f;
}

TEST(BuildModel, FlowFamilies) {
  auto p = params(2, true);
  auto fams = build_model(testutil::complete(4), p).families();
  for (const auto& f : {"noselfb", "flowconb", "incflowb", "maxusageb", "maxflowpernodeb", "maxflowlinkb",
                        "maxlinkflowb", "airtime"})
    EXPECT_NE(std::find(fams.begin(), fams.end(), f), fams.end()) << f;
  p.airtime_per_node = false;
  fams = build_model(testutil::complete(4), p).families();
  EXPECT_EQ(std::find(fams.begin(), fams.end(), "airtime"), fams.end());
}

TEST(BuildModel, ConstraintsReferenceDeclaredVariables) {
  const auto m = build_model(testutil::complete(5), params(2, true));
  std::set<std::string> names;
  for (const auto& c : m.constraints) {
    EXPECT_TRUE(names.insert(c.name).second) << c.name;
    for (const auto& t : c.terms) {
      ASSERT_GE(t.var, 0);
      ASSERT_LT(t.var, static_cast<int>(m.variables.size()));
    }
  }
}

TEST(BuildModel, Deterministic) {
  const auto g = testutil::complete(5);
  EXPECT_EQ(build_model(g, params(2, true)).dump(), build_model(g, params(2, true)).dump());
}

TEST(BuildModel, DumpFormat) {
  const auto text = build_model(testutil::complete(2), params(1, false)).dump();
  EXPECT_NE(text.find("rdist[0,1]: "), std::string::npos) << text;
  EXPECT_NE(text.find("u[0,0,1]"), std::string::npos);
}

TEST(BuildModel, FlowNeedsDemands) {
  auto g = testutil::complete(3);
  g.nodes[1].demand_mbps.reset();
  EXPECT_THROW(build_model(g, params(1, true)), ConfigError);
  EXPECT_NO_THROW(build_model(g, params(1, false)));
}

TEST(BuildModel, RejectsBadParams) {
  const auto g = testutil::complete(3);
  EXPECT_THROW(build_model(g, params(0, false)), ParameterError);
  EXPECT_THROW(build_model(g, params(1, false, -1)), ParameterError);
  EXPECT_THROW(build_model(g, params(1, false, 3, 0)), ParameterError);
}

TEST(BuildModel, SingleNodeIsItsOwnDonor) {
  const auto s = solve_exact(build_model(testutil::nodes(1), params(1, true)), quick());
  EXPECT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_EQ(s.objective, 1.0);
  EXPECT_EQ(s.donor_set, std::vector<int>{0});
}

TEST(FixDonors, PinEverything) {
  const auto g = testutil::complete(4);
  const auto m = fix_donors(build_model(g, params(1, true)), {0, 1, 2, 3});
  const auto s = solve_exact(m, quick());
  EXPECT_EQ(s.objective, 4.0);
}

TEST(FixDonors, StarCenterCarriesTheLeaves) {
  // Hub 0 reaches every leaf, leaves reach only the hub.
  auto g = testutil::nodes(5);
  for (int leaf = 1; leaf < 5; ++leaf) testutil::link(g, 0, leaf);
  const auto p = params(1, true, 2, 5);
  for (int pin : {0, 3}) {
    const auto s = solve_exact(fix_donors(build_model(g, p), {pin}), quick());
    EXPECT_EQ(s.objective, 1.0) << "pin " << pin;
    EXPECT_EQ(s.donor_set, std::vector<int>{pin});
  }
  // A leaf pin with depth 1 needs the hub as a second donor.
  const auto s = solve_exact(fix_donors(build_model(g, params(1, true, 1, 5)), {3}), quick());
  EXPECT_EQ(s.objective, 2.0);
  EXPECT_EQ(s.donor_set, (std::vector<int>{0, 3}));
}

TEST(FixDonors, UnknownOrRemovedNode) {
  auto g = testutil::nodes(3);
  testutil::link(g, 0, 1);
  const auto kept = remove_isolated(g).graph;
  const auto m = build_model(kept, params(1, true));
  EXPECT_THROW(fix_donors(m, {2}), ParameterError);
  EXPECT_THROW(fix_donors(m, {42}), ParameterError);
}

TEST(WeightedObjective, UnitCostsMatchDefault) {
  const auto g = testutil::complete(4);
  const auto m = build_model(g, params(2, true));
  std::map<int, double> ones{{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}};
  EXPECT_EQ(solve_exact(weighted_objective(m, ones), quick()).objective, solve_exact(m, quick()).objective);
}

TEST(WeightedObjective, AvoidsExpensiveNode) {
  // Path 0 - 1 - 2, costs {10, 1, 1}; either cheap node covers the path.
  auto g = testutil::nodes(3);
  testutil::link(g, 0, 1);
  testutil::link(g, 1, 2);
  const auto s = solve_exact(weighted_objective(build_model(g, params(1, true)), {{0, 10.0}, {1, 1.0}, {2, 1.0}}), quick());
  EXPECT_EQ(s.objective, 1.0);
  EXPECT_FALSE(s.is_donor(0));
  // Expensive hub: the cheapest donor sets avoid node 1.
  const auto t = solve_exact(weighted_objective(build_model(g, params(1, true, 1)), {{0, 1.0}, {1, 10.0}, {2, 1.0}}), quick());
  EXPECT_EQ(t.objective, 2.0);
  EXPECT_FALSE(t.is_donor(1));
}

TEST(WeightedObjective, ZeroCostNodePreferred) {
  auto g = testutil::nodes(3);
  testutil::link(g, 0, 1);
  testutil::link(g, 1, 2);
  testutil::link(g, 0, 2);
  const auto s = solve_exact(weighted_objective(build_model(g, params(1, true)), {{2, 0.0}}), quick());
  EXPECT_EQ(s.objective, 0.0);
  EXPECT_TRUE(s.is_donor(2));
}

TEST(WeightedObjective, RejectsNegativeCost) {
  const auto m = build_model(testutil::complete(3), params(1, false));
  EXPECT_THROW(weighted_objective(m, {{0, -1.0}}), ParameterError);
  EXPECT_THROW(weighted_objective(m, {{7, 1.0}}), ParameterError);
}
