#include "adsim/driver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "adsim/errors.hpp"

namespace adsim {

std::string_view to_string(DriverMode m) {
    switch (m) {
        case DriverMode::Alert: return "alert";
        case DriverMode::Distracted: return "distracted";
        case DriverMode::Off: return "off";
    }
    return "alert";
}

std::string_view to_string(AnomalyKind k) {
    switch (k) {
        case AnomalyKind::None: return "none";
        case AnomalyKind::Accel: return "accel";
        case AnomalyKind::Brake: return "brake";
        case AnomalyKind::Steer: return "steer";
    }
    return "none";
}

DriverMode driver_mode_from_string(std::string_view s) {
    if (s == "alert") return DriverMode::Alert;
    if (s == "distracted") return DriverMode::Distracted;
    if (s == "off") return DriverMode::Off;
    throw ConfigError("unknown driver mode: " + std::string(s));
}

AnomalyKind detect_anomaly(const ControlCommand& cmd, double speed, double v_cruise,
                           const SafetyLimits& lim) {
    if (std::abs(cmd.brake) > std::abs(lim.limit_brake)) return AnomalyKind::Brake;
    if (cmd.accel > lim.limit_accel || speed > lim.cruise_overspeed_factor * v_cruise)
        return AnomalyKind::Accel;
    if (std::abs(cmd.steer_delta) > lim.limit_steer) return AnomalyKind::Steer;
    return AnomalyKind::None;
}

DriverState observe(const DriverState& s, const ControlCommand& cmd, double speed,
                    double v_cruise, const SafetyLimits& lim,
                    const std::vector<AlertEvent>& alerts_now, int step, const DriverParams& p,
                    double dt) {
    DriverState n = s;
    if (p.mode == DriverMode::Off) return n;

    if (!n.alerted) {
        AnomalyKind k = AnomalyKind::None;
        if (p.mode == DriverMode::Alert) {
            AnomalyKind a = detect_anomaly(cmd, speed, v_cruise, lim);
            n.anomaly_run = a == AnomalyKind::None ? 0 : n.anomaly_run + 1;
            if (n.anomaly_run >= p.anomaly_window_steps) k = a;
        }
        if (k == AnomalyKind::None && !alerts_now.empty())
            k = alerts_now.front().kind == AlertKind::SteerSaturated ? AnomalyKind::Steer
                                                                      : AnomalyKind::Brake;
        if (k != AnomalyKind::None) {
            n.alerted = true;
            n.alert_step = step;
            n.cause = k;
            n.attention_steps = 0;
        }
        return n;
    }

    if (!n.engaged) {
        ++n.attention_steps;
        if (n.attention_steps >= static_cast<int>(std::lround(p.reaction_time / dt))) {
            n.engaged = true;
            n.engage_step = step;
            n.braking = true;
            n.steering = n.cause == AnomalyKind::Steer;
        }
    }
    return n;
}

double reaction_brake(double t) {
    double z = 10.0 * t - 12.0;
    // logistic form, identical to e^z/(1+e^z) but safe for large z
    return 1.0 / (1.0 + std::exp(-z));
}

ControlCommand override_command(const ControlCommand& adas_cmd, const DriverState& s,
                                double t_since_engage, const DriverScene& scene,
                                const DriverParams& p) {
    if (!s.engaged) return adas_cmd;
    ControlCommand c = adas_cmd;
    double prof = reaction_brake(t_since_engage);
    if (s.braking) {
        c.accel = 0.0;
        c.brake = prof * p.max_decel;
    }
    if (s.steering) {
        double target = scene.wheelbase * scene.curvature - p.k_offset * scene.lateral_offset -
                        p.k_heading * scene.heading;
        double target_deg = target * 180.0 / std::numbers::pi;
        double cap = p.steer_limit * prof;
        c.steer_delta = std::clamp((target_deg - scene.steer_angle) * p.steer_gain, -cap, cap);
    }
    return c;
}

void Driver::observe(const ControlCommand& cmd, double speed,
                     const std::vector<AlertEvent>& alerts_now, int step) {
    s_ = adsim::observe(s_, cmd, speed, v_cruise_, lim_, alerts_now, step, p_, dt_);
}

ControlCommand Driver::act(const ControlCommand& cmd, const DriverScene& scene, int step) {
    if (!s_.engaged) return cmd;
    if (s_.braking) {
        bool safe = !scene.lead_present ||
                    (scene.rs <= 0.0 && scene.rel_dist / std::max(scene.speed, 0.1) >= p_.t_safe);
        if (safe) s_.braking = false;
    }
    if (s_.steering && std::abs(scene.lateral_offset) < p_.recenter_offset &&
        std::abs(scene.heading) < p_.recenter_heading)
        s_.steering = false;
    return override_command(cmd, s_, (step - s_.engage_step) * dt_, scene, p_);
}

}  // namespace adsim
