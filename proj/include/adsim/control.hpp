#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "adsim/sim_core.hpp"

namespace adsim {

struct SafetyLimits {
    double limit_accel = 2.0;
    double limit_brake = -3.5;
    double limit_steer = 0.25;  // degrees per step
    double cruise_overspeed_factor = 1.1;

    // vehicle ADAS box, and the two attacker value sets
    static SafetyLimits adas() { return {2.0, -3.5, 0.25, 1.1}; }
    static SafetyLimits fixed() { return {2.4, -4.0, 0.5, 1.1}; }
    static SafetyLimits strategic() { return {2.0, -3.5, 0.25, 1.1}; }
};

enum class AlertKind { SteerSaturated, FCW };
std::string_view to_string(AlertKind k);

struct AlertEvent {
    AlertKind kind;
    int timestep;
    bool operator==(const AlertEvent&) const = default;
};

struct AccParams {
    double k_speed = 0.4;   // 1/s
    double k_gap = 0.1;     // 1/s^2
    double k_rs = 0.0;      // 1/s, optional relative-speed damping
    double follow_gap = 2.5;  // s
};

struct AlcParams {
    double k_offset = 0.005;   // rad per m
    double k_heading = 0.2;    // rad per rad
    double k_feedforward = 0.2;
    double tau = 0.5;          // s, steer tracking time constant
};

struct LeadTrack {
    double rel_dist = 0.0;
    double rs = 0.0;  // ego minus lead
};

// Longitudinal plan from (measured) ego speed. Returns accel/brake only.
ControlCommand acc_plan(double ego_speed, const std::optional<LeadTrack>& lead, double v_cruise,
                        const AccParams& p, const SafetyLimits& lim);

// Unclipped per-step steer request toward the PD target angle.
// lateral_offset is relative to the lane centre (positive = right).
double alc_request(double lateral_offset, double heading, double steer_angle, double curvature,
                   double wheelbase, const AlcParams& p, double dt);

// alc_request clipped to +-limit_steer
double alc_plan(const VehicleState& ego, double lane_center, const LaneGeometry& lane,
                double wheelbase, const AlcParams& p, const SafetyLimits& lim, double dt);

// Box clip plus the overspeed cap on gas: ego_speed + accel*dt <= factor*v_cruise.
// Idempotent.
ControlCommand enforce_safety_limits(const ControlCommand& cmd, const SafetyLimits& lim,
                                     double ego_speed, double v_cruise, double dt = 0.01);

// Counts consecutive steps with the pre-clip steer request above the limit.
// Emits one alert per saturation episode, when the run reaches `window`.
class SteerSaturationTracker {
public:
    explicit SteerSaturationTracker(int window = 50) : window_(window) {}
    std::optional<AlertEvent> update(double raw_steer, double limit_steer, int timestep);
    int count() const { return count_; }

private:
    int window_;
    int count_ = 0;
};

// Fires when the commanded brake reaches the vehicle threshold.
std::optional<AlertEvent> fcw_check(const ControlCommand& cmd, const SafetyLimits& vehicle,
                                    int timestep = 0);

}  // namespace adsim
