#include "adsim/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adsim/errors.hpp"

namespace adsim {

namespace {

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

int LaneGeometry::nearest_lane(double y) const {
    int idx = static_cast<int>(std::floor((y + road_half_width()) / lane_width));
    return std::clamp(idx, 0, num_lanes - 1);
}

VehicleState step_vehicle(const VehicleState& s, const ControlCommand& cmd, double dt,
                          const LaneGeometry& lane, double wheelbase) {
    if (!finite_all({cmd.accel, cmd.brake, cmd.steer_delta, dt, s.x, s.y, s.heading, s.speed,
                     s.steer, lane.curvature, wheelbase}))
        throw NumericDomainError("step_vehicle: non-finite input");
    if (dt <= 0.0) throw NumericDomainError("step_vehicle: dt must be positive");
    if (wheelbase <= 0.0) throw NumericDomainError("step_vehicle: wheelbase must be positive");

    double a = cmd.brake < 0.0 ? cmd.brake : std::max(0.0, cmd.accel);

    VehicleState n = s;
    n.steer = s.steer + cmd.steer_delta;
    n.accel = a;

    // distance covered, stopping early if the brake reaches zero speed
    double v1 = s.speed + a * dt;
    double ds;
    if (v1 > 0.0) {
        ds = s.speed * dt + 0.5 * a * dt * dt;
        n.speed = v1;
    } else {
        ds = a < 0.0 ? s.speed * s.speed / (-2.0 * a) : 0.0;
        n.speed = 0.0;
    }

    double c = std::tan(deg2rad(n.steer)) / wheelbase - lane.curvature;
    double h0 = s.heading;
    double h1 = h0 + c * ds;
    if (std::abs(c * ds) > 1e-9) {
        n.y = s.y + (std::cos(h0) - std::cos(h1)) / c;
        n.x = s.x + (std::sin(h1) - std::sin(h0)) / c;
    } else {
        // second-order series, avoids the 0/0
        double hm = h0 + 0.5 * c * ds;
        n.y = s.y + ds * std::sin(hm);
        n.x = s.x + ds * std::cos(hm);
    }
    n.heading = h1;
    return n;
}

LaneOffsets lane_offsets(const VehicleState& s, const LaneGeometry& lane, double vehicle_width,
                         int lane_idx) {
    double rel = s.y - lane.lane_center(lane_idx);
    double half = 0.5 * lane.lane_width;
    double hw = 0.5 * vehicle_width;
    return {std::max(0.0, half + rel - hw), std::max(0.0, half - rel - hw)};
}

LaneOffsets lane_offsets(const VehicleState& s, const LaneGeometry& lane, double vehicle_width) {
    return lane_offsets(s, lane, vehicle_width, lane.nearest_lane(s.y));
}

Headway headway_from(double rel_dist, double ego_speed, double lead_speed) {
    Headway h;
    h.rel_dist = rel_dist;
    h.hwt = ego_speed > 0.0 ? rel_dist / ego_speed : kInf;
    h.rs = ego_speed - lead_speed;
    return h;
}

Headway headway(const VehicleState& ego, const VehicleState& lead, double lead_length) {
    return headway_from(lead.x - lead_length - ego.x, ego.speed, lead.speed);
}

double predict_speed(SpeedEstimate& est, double accel, double dt) {
    est.v_hat_prior = est.v_hat + accel * dt;
    return est.v_hat_prior;
}

SpeedEstimate kalman_update(const SpeedEstimate& est, double measured) {
    SpeedEstimate out = est;
    double k = est.kalman_gain;
    out.v_hat = std::max(0.0, est.v_hat_prior + k * (measured - est.v_hat_prior));
    return out;
}

}  // namespace adsim
