#include "adsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace adsim {

std::string_view to_string(AlertKind k) {
    return k == AlertKind::FCW ? "FCW" : "SteerSaturated";
}

ControlCommand acc_plan(double ego_speed, const std::optional<LeadTrack>& lead, double v_cruise,
                        const AccParams& p, const SafetyLimits& lim) {
    double a = p.k_speed * (v_cruise - ego_speed);
    if (lead && ego_speed > 0.0 && lead->rel_dist / ego_speed < p.follow_gap) {
        double follow = p.k_gap * (lead->rel_dist - p.follow_gap * ego_speed) - p.k_rs * lead->rs;
        a = std::min(a, follow);
    }
    ControlCommand c;
    c.accel = std::clamp(a, 0.0, lim.limit_accel);
    c.brake = std::clamp(a, lim.limit_brake, 0.0);
    return c;
}

double alc_request(double lateral_offset, double heading, double steer_angle, double curvature,
                   double wheelbase, const AlcParams& p, double dt) {
    double target = p.k_feedforward * wheelbase * curvature - p.k_offset * lateral_offset -
                    p.k_heading * heading;
    double target_deg = target * 180.0 / std::numbers::pi;
    return (target_deg - steer_angle) * dt / p.tau;
}

double alc_plan(const VehicleState& ego, double lane_center, const LaneGeometry& lane,
                double wheelbase, const AlcParams& p, const SafetyLimits& lim, double dt) {
    double u = alc_request(ego.y - lane_center, ego.heading, ego.steer, lane.curvature, wheelbase,
                           p, dt);
    return std::clamp(u, -lim.limit_steer, lim.limit_steer);
}

ControlCommand enforce_safety_limits(const ControlCommand& cmd, const SafetyLimits& lim,
                                     double ego_speed, double v_cruise, double dt) {
    ControlCommand c;
    c.accel = std::clamp(cmd.accel, 0.0, lim.limit_accel);
    c.brake = std::clamp(cmd.brake, lim.limit_brake, 0.0);
    c.steer_delta = std::clamp(cmd.steer_delta, -lim.limit_steer, lim.limit_steer);
    double headroom = (lim.cruise_overspeed_factor * v_cruise - ego_speed) / dt;
    c.accel = std::min(c.accel, std::max(0.0, headroom));
    return c;
}

std::optional<AlertEvent> SteerSaturationTracker::update(double raw_steer, double limit_steer,
                                                         int timestep) {
    if (std::abs(raw_steer) > limit_steer)
        ++count_;
    else
        count_ = 0;
    if (count_ == window_) return AlertEvent{AlertKind::SteerSaturated, timestep};
    return std::nullopt;
}

std::optional<AlertEvent> fcw_check(const ControlCommand& cmd, const SafetyLimits& vehicle,
                                    int timestep) {
    if (std::abs(cmd.brake) >= std::abs(vehicle.limit_brake))
        return AlertEvent{AlertKind::FCW, timestep};
    return std::nullopt;
}

}  // namespace adsim
