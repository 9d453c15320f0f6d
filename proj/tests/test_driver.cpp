#include <cmath>

#include <gtest/gtest.h>

#include "adsim/driver.hpp"
#include "adsim/errors.hpp"

using namespace adsim;

namespace {
constexpr double kVc = 26.8224;
}

TEST(ReactionBrake, Curve) {
    EXPECT_EQ(reaction_brake(1.2), 0.5);
    EXPECT_NEAR(reaction_brake(0.0), 6.144e-6, 1e-9);
    EXPECT_NEAR(reaction_brake(1.5), std::exp(3.0) / (1.0 + std::exp(3.0)), 1e-15);
    EXPECT_NEAR(reaction_brake(1.5), 0.95257, 1e-5);
    double prev = 0.0;
    for (double t = 0.0; t < 3.0; t += 0.05) {
        EXPECT_GT(reaction_brake(t), prev);
        prev = reaction_brake(t);
    }
    EXPECT_LE(reaction_brake(100.0), 1.0);
}

TEST(Anomaly, StrategicValuesAreNotAnomalies) {
    auto lim = SafetyLimits::adas();
    EXPECT_EQ(detect_anomaly({2.0, 0.0, 0.25}, kVc, kVc, lim), AnomalyKind::None);
    EXPECT_EQ(detect_anomaly({0.0, -3.5, -0.25}, 1.1 * kVc, kVc, lim), AnomalyKind::None);
    EXPECT_EQ(detect_anomaly({2.4, 0.0, 0.0}, 10, kVc, lim), AnomalyKind::Accel);
    EXPECT_EQ(detect_anomaly({0.0, -4.0, 0.0}, 10, kVc, lim), AnomalyKind::Brake);
    EXPECT_EQ(detect_anomaly({0.0, 0.0, 0.5}, 10, kVc, lim), AnomalyKind::Steer);
    EXPECT_EQ(detect_anomaly({0.0, 0.0, 0.0}, 1.1 * kVc + 0.01, kVc, lim), AnomalyKind::Accel);
}

TEST(Driver, EngagesReactionTimeAfterAlert) {
    Driver d({}, SafetyLimits::adas(), kVc, 0.01);
    for (int k = 0; k < 1400; ++k) {
        std::vector<AlertEvent> alerts;
        if (k == 1000) alerts.push_back({AlertKind::FCW, k});
        d.observe({}, 20.0, alerts, k);
        if (k < 1250) EXPECT_FALSE(d.state().engaged) << k;
    }
    EXPECT_TRUE(d.state().engaged);
    EXPECT_EQ(d.state().alert_step, 1000);
    EXPECT_EQ(d.state().engage_step, 1250);
    EXPECT_NEAR(d.state().engage_step * 0.01, 12.5, 1e-12);
}

TEST(Driver, StrategicAttackNeverAlerts) {
    Driver d({}, SafetyLimits::adas(), kVc, 0.01);
    for (int k = 0; k < 3000; ++k) d.observe({2.0, -3.5, 0.25}, 1.1 * kVc, {}, k);
    EXPECT_FALSE(d.state().alerted);
}

TEST(Driver, Modes) {
    DriverParams off;
    off.mode = DriverMode::Off;
    Driver a(off, SafetyLimits::adas(), kVc, 0.01);
    for (int k = 0; k < 500; ++k) a.observe({0.0, -6.0, 0.0}, 10, {{AlertKind::FCW, k}}, k);
    EXPECT_FALSE(a.state().alerted);

    DriverParams dis;
    dis.mode = DriverMode::Distracted;
    Driver b(dis, SafetyLimits::adas(), kVc, 0.01);
    b.observe({0.0, -6.0, 0.0}, 10, {}, 0);
    EXPECT_FALSE(b.state().alerted);
    b.observe({}, 10, {{AlertKind::SteerSaturated, 1}}, 1);
    EXPECT_TRUE(b.state().alerted);
    EXPECT_EQ(b.state().cause, AnomalyKind::Steer);
    EXPECT_EQ(driver_mode_from_string("distracted"), DriverMode::Distracted);
    EXPECT_THROW(driver_mode_from_string("asleep"), ConfigError);
}

TEST(Override, HalfBrakeAtMidpoint) {
    DriverState s;
    s.engaged = true;
    s.braking = true;
    s.cause = AnomalyKind::Accel;
    DriverParams p;
    auto c = override_command({2.0, 0.0, 0.1}, s, 1.2, {}, p);
    EXPECT_EQ(c.brake, 0.5 * p.max_decel);
    EXPECT_EQ(c.accel, 0.0);
    EXPECT_EQ(c.steer_delta, 0.1);
    DriverState idle;
    EXPECT_EQ(override_command({2.0, 0.0, 0.1}, idle, 1.2, {}, p), (ControlCommand{2.0, 0.0, 0.1}));
}

TEST(Override, CounterSteerPointsBack) {
    DriverState s;
    s.engaged = true;
    s.steering = true;
    DriverScene sc;
    sc.lateral_offset = 1.0;
    auto c = override_command({}, s, 3.0, sc, {});
    EXPECT_LT(c.steer_delta, 0.0);
    EXPECT_GE(c.steer_delta, -1.0);
}

TEST(Driver, ReleasesBrakeOnceSafe) {
    Driver d({}, SafetyLimits::adas(), kVc, 0.01);
    d.observe({3.0, 0.0, 0.0}, 20.0, {}, 0);
    for (int k = 1; k <= 250; ++k) d.observe({}, 20.0, {}, k);
    ASSERT_TRUE(d.state().engaged);
    DriverScene close;
    close.speed = 20.0;
    close.lead_present = true;
    close.rel_dist = 20.0;
    close.rs = 3.0;
    EXPECT_LT(d.act({}, close, 300).brake, 0.0);
    DriverScene open = close;
    open.rel_dist = 80.0;
    open.rs = -1.0;
    EXPECT_EQ(d.act({1.0, 0.0, 0.0}, open, 301), (ControlCommand{1.0, 0.0, 0.0}));
}
