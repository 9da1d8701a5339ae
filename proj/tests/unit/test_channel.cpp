#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "iabplan/channel.hpp"

using namespace iab;

namespace {

const McsRow kTop{24.0, 27, 8, 0.9258, 0.05};

}  // namespace

TEST(Pathloss, LosAt100m) { EXPECT_NEAR(pathloss_db(100.0, true, {}), 103.03, 0.01); }

TEST(Pathloss, LosAt1m) { EXPECT_NEAR(pathloss_db(1.0, true, {}), 61.03, 0.01); }

TEST(Pathloss, NlosAt100m) { EXPECT_NEAR(pathloss_db(100.0, false, {}), 123.488, 0.01); }

TEST(Pathloss, NlosNeverBelowLos) {
  for (double d : {1.0, 5.0, 20.0, 300.0, 2000.0}) EXPECT_GE(pathloss_db(d, false, {}), pathloss_db(d, true, {}));
}

TEST(Pathloss, RejectsNonPositiveDistance) {
  EXPECT_THROW(pathloss_db(0.0, true, {}), ParameterError);
  EXPECT_THROW(pathloss_db(-1.0, false, {}), ParameterError);
}

TEST(LosProbability, Values) {
  EXPECT_DOUBLE_EQ(los_probability(10.0), 1.0);
  EXPECT_DOUBLE_EQ(los_probability(18.0), 1.0);
  EXPECT_NEAR(los_probability(36.0), 0.5 + 0.5 * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(los_probability(36.0), 0.684, 0.001);
  EXPECT_LT(los_probability(1e6), 1e-4);
  EXPECT_THROW(los_probability(0.0), ParameterError);
}

TEST(LosProbability, Decreasing) {
  double prev = 1.0;
  for (double d = 18.0; d < 2000.0; d += 7.0) {
    const double p = los_probability(d);
    EXPECT_LE(p, prev + 1e-12);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
}

TEST(Snr, HandEvaluated) {
  const RadioParams p;
  EXPECT_NEAR(p.beamforming_gain_db(), 36.12, 0.01);
  EXPECT_NEAR(p.noise_floor_dbm(), -174.0 + 86.02 + 7.0, 0.01);
  EXPECT_NEAR(link_snr_db(103.03, p), 47.1, 0.05);
}

TEST(Snr, ZeroAtDefiningPathloss) {
  const RadioParams p;
  const double pl = p.tx_power_dbm + p.beamforming_gain_db() - p.noise_floor_dbm();
  EXPECT_NEAR(link_snr_db(pl, p), 0.0, 1e-9);
}

TEST(Snr, LinearInPathloss) {
  const RadioParams p;
  EXPECT_NEAR(link_snr_db(110.0, p) - link_snr_db(113.0, p), 3.0, 1e-9);
}

TEST(SelectMcs, Rules) {
  const auto t = McsTable::synthetic4();
  EXPECT_FALSE(select_mcs(0.5, t, 0.1).has_value());
  EXPECT_EQ(select_mcs(100.0, t, 0.1)->mcs_index, 27);
  EXPECT_EQ(select_mcs(9.0, t, 0.1)->mcs_index, 10);
  EXPECT_EQ(select_mcs(8.999, t, 0.1)->mcs_index, 2);
}

TEST(SelectMcs, SkipsRowsAtOrAboveBlerTarget) {
  auto t = McsTable::synthetic4();
  t.rows.back().bler = 0.1;
  EXPECT_EQ(select_mcs(100.0, t, 0.1)->mcs_index, 19);
}

TEST(SelectMcs, ReturnedRowIsAdmissible) {
  const auto t = McsTable::synthetic4();
  for (double s = -5.0; s < 40.0; s += 0.25) {
    const auto r = select_mcs(s, t, 0.1);
    if (!r) continue;
    EXPECT_LE(r->snr_db, s);
    EXPECT_LT(r->bler, 0.1);
  }
}

TEST(Capacity, TopRowTableOne) {
  RadioParams p;
  EXPECT_NEAR(p.symbol_duration_s(), 8.9286e-6, 1e-9);
  const double c1 = link_capacity_mbps(kTop, p);
  EXPECT_NEAR(c1, 754.0, 1.0);
  p.mimo_layers = 2;
  EXPECT_EQ(link_capacity_mbps(kTop, p), 2.0 * c1);
}

TEST(Capacity, NoMcsIsZero) {
  EXPECT_EQ(link_capacity_mbps(std::optional<McsRow>{}, RadioParams{}), 0.0);
}

TEST(Capacity, MonotoneInSnr) {
  const auto t = McsTable::synthetic4();
  const RadioParams p;
  double prev = 0.0;
  for (double s = -5.0; s < 40.0; s += 0.5) {
    const double c = link_capacity_mbps(select_mcs(s, t, p.max_bler), p);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(RadioParams, Validation) {
  RadioParams p;
  EXPECT_NO_THROW(p.validate());
  p.dl_slot_ratio = 1.0;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.max_bler = 0.0;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.rb_count = 0;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(McsCsv, ParsesAndValidates) {
  std::istringstream ok("snr_db,mcs_index,modulation_order,code_rate,bler\n1,2,2,0.3,0.05\n9,10,4,0.64,0.05\n");
  const auto t = parse_mcs_csv(ok);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1].modulation_order, 4);
  std::istringstream no_header("1,2,2,0.3,0.05\n");
  EXPECT_THROW(parse_mcs_csv(no_header), ParseError);
  std::istringstream unsorted("snr_db,mcs_index,modulation_order,code_rate,bler\n9,10,4,0.64,0.05\n1,2,2,0.3,0.05\n");
  EXPECT_THROW(parse_mcs_csv(unsorted).validate(), std::exception);
}

TEST(McsCsv, ShippedTables) {
  const auto s4 = load_mcs_csv(std::string(IABPLAN_DATA_DIR) + "/mcs_synthetic4.csv");
  const auto builtin = McsTable::synthetic4();
  ASSERT_EQ(s4.rows.size(), builtin.rows.size());
  for (std::size_t i = 0; i < s4.rows.size(); ++i) {
    EXPECT_DOUBLE_EQ(s4.rows[i].snr_db, builtin.rows[i].snr_db);
    EXPECT_DOUBLE_EQ(s4.rows[i].code_rate, builtin.rows[i].code_rate);
  }
  const auto nr = load_mcs_csv(std::string(IABPLAN_DATA_DIR) + "/mcs_nr256.csv");
  EXPECT_NO_THROW(nr.validate(0.1));
  EXPECT_EQ(nr.rows.size(), 28u);
}

TEST(PopulateEdges, CloseNodesAreSymmetricLos) {
  auto g = testutil::nodes(2);
  g.nodes[1].position.x = 10.0;
  const RadioParams p;
  const auto out = populate_edges(g, p, McsTable::synthetic4(), 1);
  ASSERT_EQ(out.edges.size(), 2u);
  EXPECT_EQ(out.edges[0].capacity_mbps, out.edges[1].capacity_mbps);
  EXPECT_NEAR(out.edges[0].snr_db, link_snr_db(pathloss_db(std::hypot(10.0, 0.0), true, p), p), 1e-9);
}

TEST(PopulateEdges, FarNodesHaveNoEdge) {
  auto g = testutil::nodes(2);
  g.nodes[1].position.x = 50000.0;
  EXPECT_TRUE(populate_edges(g, {}, McsTable::synthetic4(), 1).edges.empty());
}

TEST(PopulateEdges, DeterministicAndSymmetric) {
  const auto g = generate_synthetic(15, 45.0, 4);
  const auto a = populate_edges(g, {}, McsTable::synthetic4(), 4);
  EXPECT_EQ(a, populate_edges(g, {}, McsTable::synthetic4(), 4));
  EXPECT_FALSE(a.edges.empty());
  for (const auto& e : a.edges) {
    const auto* back = a.find_edge(e.dst, e.src);
    ASSERT_NE(back, nullptr);
    EXPECT_EQ(back->capacity_mbps, e.capacity_mbps);
  }
  // Dense synthetic placement: most pairs can talk.
  EXPECT_GT(a.edges.size(), 15u * 14u / 2u);
}

TEST(PopulateEdges, LayersScaleEveryEdge) {
  const auto g = generate_synthetic(10, 45.0, 8);
  RadioParams two;
  two.mimo_layers = 2;
  const auto a = populate_edges(g, {}, McsTable::synthetic4(), 8);
  const auto b = populate_edges(g, two, McsTable::synthetic4(), 8);
  ASSERT_EQ(a.edges.size(), b.edges.size());
  for (std::size_t i = 0; i < a.edges.size(); ++i) EXPECT_EQ(b.edges[i].capacity_mbps, 2.0 * a.edges[i].capacity_mbps);
}
