#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "adsim/control.hpp"
#include "adsim/sim_core.hpp"

namespace adsim {

enum class Hazard { H1, H2, H3 };
enum class Accident { A1, A2, A3 };
std::string_view to_string(Hazard h);
std::string_view to_string(Accident a);

struct MonitorParams {
    double h1_hwt = 1.0;          // s
    double h2_speed = 0.1;        // m/s
    double h2_lead_range = 100.0; // m
    double a2_dwell = 5.0;        // s
    double moving_speed = 1.0;    // m/s, H2 only counts after the ego has moved
};

// Ground truth the monitor looks at each step.
struct MonitorInput {
    VehicleState ego;
    VehicleState lead;
    bool lead_exists = true;
    double v_cruise = 0.0;
};

struct RunResult {
    std::map<Hazard, int> hazards;      // first-occurrence step
    std::map<Accident, int> accidents;  // step
    std::vector<AlertEvent> alerts;
    int lane_invasions = 0;
    double elapsed = 0.0;               // s simulated
    std::optional<double> activation;   // s
    std::optional<double> first_hazard; // s, post-activation (or any, when unattacked)
    std::optional<double> tth;          // s
    bool pre_activation_hazard = false;
    std::optional<double> driver_alerted;
    std::optional<double> driver_engaged;
    int steps = 0;

    bool hazardous() const { return first_hazard.has_value(); }
    bool any_accident() const { return !accidents.empty(); }
    bool any_alert() const { return !alerts.empty(); }
    int fcw_count() const;
    double lane_inv_rate() const { return elapsed > 0.0 ? lane_invasions / elapsed : 0.0; }
};

// first_hazard - activation; absent when either is absent or the hazard came first
std::optional<double> tth(std::optional<double> activation, std::optional<double> first_hazard);

class HazardMonitor {
public:
    HazardMonitor(const MonitorParams& p, const LaneGeometry& lane, const VehicleGeometry& geo,
                  int ego_lane, double dt)
        : p_(p), lane_(lane), geo_(geo), ego_lane_(ego_lane), dt_(dt) {}

    std::vector<Hazard> check_hazards(const MonitorInput& in, int step);
    std::vector<Accident> check_accidents(const MonitorInput& in, int step);
    int record_lane_invasion(const VehicleState& ego);

    const std::map<Hazard, int>& hazards() const { return hazards_; }
    const std::map<Accident, int>& accidents() const { return accidents_; }
    int lane_invasions() const { return invasions_; }
    bool terminated() const { return !accidents_.empty(); }

    // current-step predicates (not latched)
    bool h1_now(const MonitorInput& in) const;
    bool h2_now(const MonitorInput& in) const;
    bool h3_now(const VehicleState& ego) const;

private:
    MonitorParams p_;
    LaneGeometry lane_;
    VehicleGeometry geo_;
    int ego_lane_;
    double dt_;
    std::map<Hazard, int> hazards_;
    std::map<Accident, int> accidents_;
    bool moved_ = false;
    int h2_dwell_ = 0;
    bool outside_ = false;
    int invasions_ = 0;
};

}  // namespace adsim
