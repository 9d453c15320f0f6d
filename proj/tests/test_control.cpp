#include <cmath>

#include <gtest/gtest.h>

#include "adsim/control.hpp"

using namespace adsim;

TEST(AccPlan, CruisesWithoutLead) {
    auto c = acc_plan(10.0, std::nullopt, 26.8224, {}, SafetyLimits::adas());
    EXPECT_DOUBLE_EQ(c.accel, 2.0);
    EXPECT_EQ(c.brake, 0.0);
    c = acc_plan(26.8224, std::nullopt, 26.8224, {}, SafetyLimits::adas());
    EXPECT_EQ(c.accel, 0.0);
}

TEST(AccPlan, BrakesOnCloseLead) {
    auto c = acc_plan(25.0, LeadTrack{20.0, 5.0}, 26.8224, {}, SafetyLimits::adas());
    EXPECT_LT(c.brake, 0.0);
    EXPECT_EQ(c.accel, 0.0);
    EXPECT_GE(c.brake, -3.5);
}

TEST(AccPlan, FollowingGapErrorDecays) {
    // closed loop against a 15.6 m/s lead, exact kinematics
    AccParams p;
    double gap = 60.0, v = 20.0, lead = 15.6464;
    for (int k = 0; k < 12000; ++k) {
        auto c = acc_plan(v, LeadTrack{gap, v - lead}, 26.8224, p, SafetyLimits::adas());
        double a = c.brake < 0 ? c.brake : c.accel;
        v = std::max(0.0, v + a * 0.01);
        gap += (lead - v) * 0.01;
    }
    EXPECT_NEAR(gap / v, p.follow_gap, 0.05);
    EXPECT_NEAR(v, lead, 0.05);
}

TEST(Alc, ConvergesFromHalfMetreOnStraightRoad) {
    LaneGeometry lane;
    lane.curvature = 0.0;
    VehicleState s;
    s.speed = 20.0;
    s.y = lane.lane_center(1) + 0.5;
    AlcParams p;
    for (int k = 0; k < 1000; ++k) {
        ControlCommand c;
        c.steer_delta = alc_plan(s, lane.lane_center(1), lane, 2.7, p, SafetyLimits::adas(), 0.01);
        s = step_vehicle(s, c, 0.01, lane);
    }
    EXPECT_LT(std::abs(s.y - lane.lane_center(1)), 0.05);
}

TEST(Alc, RequestIsFirstOrderTowardTarget) {
    AlcParams p;
    // no error, no curvature: holds
    EXPECT_EQ(alc_request(0, 0, 0, 0, 2.7, p, 0.01), 0.0);
    // pushed left when right of centre
    EXPECT_LT(alc_request(0.5, 0, 0, 0, 2.7, p, 0.01), 0.0);
    double target = -p.k_offset * 0.5 * 180.0 / M_PI;
    EXPECT_NEAR(alc_request(0.5, 0, 0.1, 0, 2.7, p, 0.01), (target - 0.1) * 0.01 / p.tau, 1e-15);
}

TEST(EnforceSafetyLimits, ClipsAndIsIdempotent) {
    auto lim = SafetyLimits::adas();
    const double vc = 26.8224;
    for (double a : {-1.0, 0.0, 1.0, 2.0, 5.0})
        for (double b : {-9.0, -3.5, -1.0, 0.0, 1.0})
            for (double s : {-1.0, -0.25, 0.0, 0.1, 3.0})
                for (double v : {0.0, 20.0, 29.49, 29.6, 35.0}) {
                    ControlCommand c{a, b, s};
                    auto once = enforce_safety_limits(c, lim, v, vc);
                    EXPECT_EQ(enforce_safety_limits(once, lim, v, vc), once);
                    EXPECT_GE(once.accel, 0.0);
                    EXPECT_LE(once.accel, 2.0);
                    EXPECT_GE(once.brake, -3.5);
                    EXPECT_LE(once.brake, 0.0);
                    EXPECT_LE(std::abs(once.steer_delta), 0.25);
                    EXPECT_LE(v + once.accel * 0.01, std::max(v, 1.1 * vc) + 1e-12);
                }
}

TEST(SteerSaturation, FiresAfterHalfSecond) {
    SteerSaturationTracker t(50);
    int fired = -1;
    for (int k = 0; k < 80; ++k)
        if (auto a = t.update(0.5, 0.25, k)) {
            EXPECT_EQ(fired, -1);
            fired = a->timestep;
            EXPECT_EQ(a->kind, AlertKind::SteerSaturated);
        }
    EXPECT_EQ(fired, 49);
    // a run broken before the window stays quiet
    SteerSaturationTracker u(50);
    for (int k = 0; k < 200; ++k) EXPECT_FALSE(u.update(k % 40 == 39 ? 0.0 : 0.5, 0.25, k));
    // exactly at the limit is not saturated
    SteerSaturationTracker w(50);
    for (int k = 0; k < 100; ++k) EXPECT_FALSE(w.update(0.25, 0.25, k));
}

TEST(Fcw, VehicleThreshold) {
    auto vehicle = SafetyLimits::fixed();
    EXPECT_TRUE(fcw_check({0, -4.0, 0}, vehicle, 3));
    EXPECT_EQ(fcw_check({0, -4.0, 0}, vehicle, 3)->timestep, 3);
    EXPECT_FALSE(fcw_check({0, -3.5, 0}, vehicle));
    EXPECT_FALSE(fcw_check({0, -3.999, 0}, vehicle));
}
