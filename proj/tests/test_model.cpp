#include <gtest/gtest.h>

#include "support.hpp"

using namespace skyroute;
using namespace testing_support;

TEST(GreatCircle, IdenticalPointsHaveZeroDistance) {
  EXPECT_EQ(great_circle({0, 0}, {0, 0}).distance_km, 0.0);
  EXPECT_EQ(great_circle({-33.9, 151.2}, {-33.9, 151.2}).distance_km, 0.0);
}

TEST(GreatCircle, OneDegreeEastAndNorth) {
  const auto east = great_circle({0, 0}, {0, 1});
  const auto [km_e, brg_e] = oracle::sphere(0, 0, 0, 1);
  EXPECT_NEAR(east.distance_km, km_e, 1e-9);
  EXPECT_NEAR(east.distance_km, 111.19, 0.005);
  EXPECT_NEAR(east.bearing_deg, 90.0, 1e-9);

  const auto north = great_circle({0, 0}, {1, 0});
  EXPECT_NEAR(north.distance_km, oracle::sphere(0, 0, 1, 0).first, 1e-9);
  EXPECT_NEAR(north.distance_km, 111.19, 0.005);
  EXPECT_NEAR(north.bearing_deg, 0.0, 1e-9);
}

TEST(GreatCircle, MatchesIndependentFormulaOnRandomPairs) {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const LatLon a{uniform(rng, -80, 80), uniform(rng, -180, 180)};
    const LatLon b{a.lat + uniform(rng, -2, 2), a.lon + uniform(rng, -2, 2)};
    const auto gc = great_circle(a, b);
    const auto [km, brg] = oracle::sphere(a.lat, a.lon, b.lat, b.lon);
    EXPECT_NEAR(gc.distance_km, km, 1e-7);
    double diff = std::fmod(std::abs(gc.bearing_deg - brg), 360.0);
    diff = std::min(diff, 360.0 - diff);
    EXPECT_LT(diff, 1e-6);
    EXPECT_GE(gc.bearing_deg, 0.0);
    EXPECT_LT(gc.bearing_deg, 360.0);
  }
}

TEST(Network, TwoStationsOnAMeridianHaveOppositeBearings) {
  const auto net = SkywayNetwork::build({station("A", 0.0, 10.0), station("B", 10.0 / 111.19, 10.0)}, {{"A", "B"}});
  ASSERT_EQ(net.size(), 2u);
  ASSERT_EQ(net.segments().size(), 2u);
  const auto& ab = net.segment(*net.find_segment(0, 1));
  const auto& ba = net.segment(*net.find_segment(1, 0));
  EXPECT_NEAR(ab.distance_km, 10.0, 0.01);
  EXPECT_NEAR(ab.bearing_deg, 0.0, 1e-9);
  EXPECT_NEAR(ba.bearing_deg, 180.0, 1e-9);
}

TEST(Network, RejectsInvalidDocuments) {
  EXPECT_THROW(SkywayNetwork::build({station("A", 0, 0), station("A", 0, 0.1)}, {{"A", "A"}}), ValidationError);
  EXPECT_THROW(SkywayNetwork::build({station("A", 0, 0), station("B", 0, 0)}, {{"A", "B"}}), ValidationError);
  EXPECT_THROW(SkywayNetwork::build({station("A", 0, 0), station("B", 0, 0.1)}, {{"A", "C"}}), ValidationError);
  EXPECT_THROW(SkywayNetwork::build({station("A", 0, 0), station("B", 0, 0.1)}, {{"A", "A"}}), ValidationError);
  EXPECT_THROW(SkywayNetwork::build({station("A", 0, 0), station("B", 0, 0.1)}, {{"A", "B"}, {"A", "B"}}),
               ValidationError);
  EXPECT_THROW(SkywayNetwork::build({station("A", 0, 0, 0), station("B", 0, 0.1)}, {{"A", "B"}}), ValidationError);
  EXPECT_THROW(SkywayNetwork::build({station("A", 0, 0), station("B", 0, 0.1), station("C", 0, 0.2)}, {{"A", "B"}}),
               ValidationError);
  EXPECT_THROW(SkywayNetwork::build({station("A", 95, 0), station("B", 0, 0.1)}, {{"A", "B"}}), ValidationError);
}

TEST(Network, BothDirectionsListedOnceEach) {
  const auto net =
      SkywayNetwork::build({station("A", 0, 0), station("B", 0, 0.1)}, {{"A", "B"}, {"B", "A"}});
  EXPECT_EQ(net.segments().size(), 2u);
}

TEST(Network, ReverseSegmentsAreAntipodalOnGeneratedScenarios) {
  for (auto topo : {bench::Topology::grid, bench::Topology::random_geometric}) {
    bench::ScenarioSpec spec;
    spec.node_count = 40;
    spec.topology = topo;
    const auto sc = bench::generate_scenario(spec);
    for (const auto& s : sc.network.segments()) {
      ASSERT_GT(s.distance_km, 0.0);
      const auto rev = sc.network.find_segment(s.to, s.from);
      ASSERT_TRUE(rev.has_value());
      const auto& r = sc.network.segment(*rev);
      EXPECT_NEAR(r.distance_km, s.distance_km, 1e-9);
      if (s.distance_km < 100.0) {
        double diff = std::fmod(std::abs(r.bearing_deg - s.bearing_deg - 180.0) + 720.0, 360.0);
        diff = std::min(diff, 360.0 - diff);
        EXPECT_LT(diff, 0.1);
      }
    }
  }
}

TEST(Drone, ValidationCatchesInconsistentRange) {
  Drone d = bench::dji_m200_v2();
  EXPECT_NO_THROW(d.validate());
  d.max_range_km = 40.0;
  EXPECT_THROW(d.validate(), ValidationError);
  d = bench::dji_m200_v2();
  d.payload_derate = 0.0;
  EXPECT_THROW(d.validate(), ValidationError);
  d = bench::dji_m200_v2();
  d.full_recharge_min = -1;
  EXPECT_THROW(d.validate(), ValidationError);
}

TEST(Request, Validation) {
  EXPECT_THROW((DeliveryRequest{"A", "A", 1.0, 0}.validate()), ValidationError);
  EXPECT_THROW((DeliveryRequest{"A", "B", 0.0, 0}.validate()), ValidationError);
  EXPECT_NO_THROW((DeliveryRequest{"A", "B", 0.1, 0}.validate()));
}

namespace {

CompositionPlan two_leg_plan() {
  CompositionPlan p;
  p.request = {"A", "C", 1.0, 100};
  p.cs_id = make_cs_id(p.request, "d");
  p.drone_id = "d";
  p.legs.push_back({make_daas_id(p.cs_id, 0), "A", "B", 100, 400, 20, 600, {}});
  p.legs.push_back({make_daas_id(p.cs_id, 1), "B", "C", 1020, 1300, 0, 0, {}});
  p.total_time_s = 1200;
  return p;
}

}  // namespace

TEST(Plan, InvariantsHoldOnAWellFormedPlan) { EXPECT_FALSE(plan_violation(two_leg_plan()).has_value()); }

TEST(Plan, InvariantViolationsAreReported) {
  auto p = two_leg_plan();
  p.legs[1].from = "X";
  EXPECT_TRUE(plan_violation(p).has_value());
  p = two_leg_plan();
  p.legs[1].wait_s = 5;
  EXPECT_TRUE(plan_violation(p).has_value());
  p = two_leg_plan();
  p.total_time_s = 1201;
  EXPECT_TRUE(plan_violation(p).has_value());
  p = two_leg_plan();
  p.legs[1].depart = 1019;
  EXPECT_TRUE(plan_violation(p).has_value());
  p = two_leg_plan();
  p.legs[0].arrive = p.legs[0].depart;
  EXPECT_TRUE(plan_violation(p).has_value());
}

TEST(Plan, Identifiers) {
  const DeliveryRequest r{"S1", "S2", 0.5, 60};
  EXPECT_EQ(make_cs_id(r, "dji"), "cs:S1:S2:60:dji");
  EXPECT_EQ(make_daas_id("cs:S1:S2:60:dji", 2), "cs:S1:S2:60:dji#2");
  EXPECT_EQ(two_leg_plan().stations(), (std::vector<std::string>{"A", "B", "C"}));
}
