#include <gtest/gtest.h>

#include "adsim/monitor.hpp"

using namespace adsim;

namespace {

HazardMonitor make() { return HazardMonitor({}, LaneGeometry{}, VehicleGeometry{}, 1, 0.01); }

MonitorInput at(double ego_speed, double gap, double lead_speed = 20.0) {
    MonitorInput in;
    in.ego.speed = ego_speed;
    in.ego.y = 1.85;
    in.lead.x = gap + 4.5;
    in.lead.y = 1.85;
    in.lead.speed = lead_speed;
    in.v_cruise = 26.8224;
    return in;
}

}  // namespace

TEST(Monitor, H1Threshold) {
    auto m = make();
    EXPECT_TRUE(m.h1_now(at(26.8, 5.0)));
    EXPECT_FALSE(m.h1_now(at(26.8, 26.8)));
    EXPECT_TRUE(m.h1_now(at(26.8, 26.7)));
    auto fresh = m.check_hazards(at(26.8, 5.0), 12);
    ASSERT_EQ(fresh.size(), 1u);
    EXPECT_EQ(m.hazards().at(Hazard::H1), 12);
    // latched at first occurrence
    m.check_hazards(at(26.8, 5.0), 13);
    EXPECT_EQ(m.hazards().at(Hazard::H1), 12);
}

TEST(Monitor, H2AndA2) {
    auto m = make();
    MonitorInput stop = at(0.0, 0.0);
    stop.lead_exists = false;
    // a car that never moved is not "stopped on the road"
    m.check_hazards(stop, 0);
    EXPECT_TRUE(m.hazards().empty());
    m.check_hazards(at(10.0, 50.0), 1);
    for (int k = 2; k < 2 + 500; ++k) {
        m.check_hazards(stop, k);
        m.check_accidents(stop, k);
        if (k < 501) EXPECT_FALSE(m.terminated()) << k;
    }
    EXPECT_EQ(m.hazards().at(Hazard::H2), 2);
    EXPECT_EQ(m.accidents().at(Accident::A2), 501);
}

TEST(Monitor, H2IgnoresCloseLead) {
    auto m = make();
    m.check_hazards(at(10.0, 50.0), 0);
    m.check_hazards(at(0.0, 8.0, 0.0), 1);
    EXPECT_FALSE(m.hazards().count(Hazard::H2));
}

TEST(Monitor, H3AndA3) {
    auto m = make();
    VehicleState e;
    e.y = 1.85 + 2.8;
    EXPECT_TRUE(m.h3_now(e));
    e.y = 1.85 + 2.79;
    EXPECT_FALSE(m.h3_now(e));
    MonitorInput in = at(20.0, 50.0);
    in.ego.y = 3.7 + 2.0 - 0.95;
    m.check_accidents(in, 5);
    EXPECT_EQ(m.accidents().at(Accident::A3), 5);
}

TEST(Monitor, A1OnContact) {
    auto m = make();
    m.check_accidents(at(20.0, 0.01), 0);
    EXPECT_FALSE(m.terminated());
    m.check_accidents(at(20.0, 0.0), 1);
    EXPECT_EQ(m.accidents().at(Accident::A1), 1);
}

TEST(Monitor, LaneInvasionIsEdgeTriggered) {
    auto m = make();
    VehicleState e;
    e.y = 1.85;
    m.record_lane_invasion(e);
    e.y = 1.85 + 1.0;  // right edge crosses the line
    for (int k = 0; k < 10; ++k) m.record_lane_invasion(e);
    EXPECT_EQ(m.lane_invasions(), 1);
    e.y = 1.85;
    m.record_lane_invasion(e);
    e.y = 1.85 - 1.0;
    m.record_lane_invasion(e);
    EXPECT_EQ(m.lane_invasions(), 2);
}

TEST(Tth, Definition) {
    EXPECT_DOUBLE_EQ(*tth(10.0, 11.4), 1.4);
    EXPECT_FALSE(tth(std::nullopt, 3.0));
    EXPECT_FALSE(tth(10.0, std::nullopt));
    EXPECT_FALSE(tth(10.0, 9.0));
}
