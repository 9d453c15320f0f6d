#pragma once

#include <limits>

namespace adsim {

inline constexpr double kMph = 0.44704;  // m/s per mph
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Actuator command. accel is the gas channel (>= 0), brake is <= 0,
// steer_delta is a per-step change of the road-wheel angle in degrees
// (negative = left).
struct ControlCommand {
    double accel = 0.0;
    double brake = 0.0;
    double steer_delta = 0.0;

    bool operator==(const ControlCommand&) const = default;
};

// Frenet-style state: x is arc length along the road (front bumper),
// y is lateral offset from the road centerline (positive = right),
// heading is relative to the road tangent. steer is the road-wheel angle
// in degrees, integrated from steer_delta.
struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;
    double accel = 0.0;
    double steer = 0.0;
};

struct VehicleGeometry {
    double width = 1.9;
    double length = 4.5;
    double wheelbase = 2.7;
};

struct LaneGeometry {
    double lane_width = 3.7;
    int num_lanes = 2;
    double curvature = -1.0 / 500.0;  // negative = left curve
    double guardrail_offset = 2.0;    // from the outer lane edge

    double road_half_width() const { return 0.5 * num_lanes * lane_width; }
    // lane 0 is the leftmost
    double lane_center(int idx) const { return -road_half_width() + (idx + 0.5) * lane_width; }
    int nearest_lane(double y) const;
};

struct SpeedEstimate {
    double v_hat = 0.0;
    double v_hat_prior = 0.0;
    double kalman_gain = 0.5;
};

struct LaneOffsets {
    double d_left = 0.0;
    double d_right = 0.0;
};

struct Headway {
    double rel_dist = 0.0;
    double hwt = kInf;
    double rs = 0.0;
};

// Exact per-step integration: the steer angle is held over the step, so
// heading is linear in travelled distance and x/y follow a circular arc.
VehicleState step_vehicle(const VehicleState& s, const ControlCommand& cmd, double dt,
                          const LaneGeometry& lane, double wheelbase = 2.7);

// Offsets of the vehicle body edges to the lines of lane `lane_idx`.
LaneOffsets lane_offsets(const VehicleState& s, const LaneGeometry& lane, double vehicle_width,
                         int lane_idx);
// Same, against whichever lane the reference point is in.
LaneOffsets lane_offsets(const VehicleState& s, const LaneGeometry& lane, double vehicle_width);

// rel_dist is bumper to bumper: lead.x - lead_length - ego.x
Headway headway(const VehicleState& ego, const VehicleState& lead, double lead_length);
Headway headway_from(double rel_dist, double ego_speed, double lead_speed);

double predict_speed(SpeedEstimate& est, double accel, double dt);
SpeedEstimate kalman_update(const SpeedEstimate& est, double measured);

}  // namespace adsim
