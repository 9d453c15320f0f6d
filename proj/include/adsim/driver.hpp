#pragma once

#include <string_view>
#include <vector>

#include "adsim/control.hpp"
#include "adsim/sim_core.hpp"

namespace adsim {

enum class DriverMode { Alert, Distracted, Off };
enum class AnomalyKind { None, Accel, Brake, Steer };

std::string_view to_string(DriverMode m);
std::string_view to_string(AnomalyKind k);
DriverMode driver_mode_from_string(std::string_view s);

struct DriverParams {
    DriverMode mode = DriverMode::Alert;
    double reaction_time = 2.5;      // s
    double max_decel = -6.0;         // m/s^2, scales the brake profile
    int anomaly_window_steps = 1;    // consecutive anomalous steps needed
    double t_safe = 2.5;             // s, headway at which braking stops
    // counter-steer
    double steer_limit = 1.0;        // deg per step, at full profile
    double steer_gain = 0.2;
    double k_offset = 0.05;          // rad per m
    double k_heading = 1.0;
    double recenter_offset = 0.5;    // m
    double recenter_heading = 0.01;  // rad
};

struct DriverState {
    int attention_steps = 0;
    int anomaly_run = 0;
    bool alerted = false;
    bool engaged = false;
    int alert_step = -1;
    int engage_step = -1;
    AnomalyKind cause = AnomalyKind::None;
    bool braking = false;
    bool steering = false;
};

// What the driver sees of the world when overriding.
struct DriverScene {
    double speed = 0.0;
    bool lead_present = false;
    double rel_dist = 0.0;
    double rs = 0.0;
    double lateral_offset = 0.0;  // from the lane centre, positive = right
    double heading = 0.0;
    double steer_angle = 0.0;     // deg
    double curvature = 0.0;
    double wheelbase = 2.7;
};

// Single-step anomaly against the ADAS limits.
AnomalyKind detect_anomaly(const ControlCommand& cmd, double speed, double v_cruise,
                           const SafetyLimits& lim);

DriverState observe(const DriverState& s, const ControlCommand& cmd, double speed,
                    double v_cruise, const SafetyLimits& lim,
                    const std::vector<AlertEvent>& alerts_now, int step, const DriverParams& p,
                    double dt);

// e^(10t-12) / (1 + e^(10t-12))
double reaction_brake(double t_since_engage);

// Pure: applies the engaged driver's inputs to adas_cmd. Identity when not engaged.
ControlCommand override_command(const ControlCommand& adas_cmd, const DriverState& s,
                                double t_since_engage, const DriverScene& scene,
                                const DriverParams& p);

// Stateful wrapper used by the simulation loop.
class Driver {
public:
    Driver(const DriverParams& p, const SafetyLimits& adas, double v_cruise, double dt)
        : p_(p), lim_(adas), v_cruise_(v_cruise), dt_(dt) {}

    void observe(const ControlCommand& cmd, double speed, const std::vector<AlertEvent>& alerts_now,
                 int step);
    // Ends finished mitigations, then overrides.
    ControlCommand act(const ControlCommand& cmd, const DriverScene& scene, int step);

    const DriverState& state() const { return s_; }

private:
    DriverParams p_;
    SafetyLimits lim_;
    double v_cruise_;
    double dt_;
    DriverState s_;
};

}  // namespace adsim
