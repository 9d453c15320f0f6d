#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adsim/attack.hpp"
#include "adsim/control.hpp"
#include "adsim/driver.hpp"
#include "adsim/monitor.hpp"
#include "adsim/sim_core.hpp"

namespace adsim {

struct NoiseParams {
    double speed = 0.05;   // m/s, gps
    double dist = 0.2;     // m, radar range
    double rs = 0.05;      // m/s, radar relative speed
    double lane = 0.02;    // m, lane-line position
    double radar_range = 150.0;
};

struct ScenarioParams {
    double v_cruise = 60.0 * kMph;
    double ego_speed0 = 8.0;       // m/s at t=0
    double ego_offset0 = 0.8;      // m right of the ego lane centre
    int ego_lane = -1;             // -1 = rightmost
    double ramp_start = 5.0;       // s
    double ramp_duration = 10.0;   // s
    bool straight = false;         // ignore lane.curvature
};

struct SimConfig {
    double dt = 0.01;
    int steps = 5000;
    VehicleGeometry vehicle;
    LaneGeometry lane;
    AccParams acc;
    AlcParams alc;
    SafetyLimits adas = SafetyLimits::adas();
    SafetyLimits fixed = SafetyLimits::fixed();
    SafetyLimits strategic = SafetyLimits::strategic();
    double fcw_brake = -4.0;  // vehicle FCW threshold
    int saturation_window = 50;
    double kalman_gain = 0.5;
    ContextThresholds context;
    AttackParams attack;
    DriverParams driver;
    MonitorParams monitor;
    NoiseParams noise;
    ScenarioParams scenario;

    int ego_lane() const { return scenario.ego_lane < 0 ? lane.num_lanes - 1 : scenario.ego_lane; }
    double curvature() const { return scenario.straight ? 0.0 : lane.curvature; }
    // throws ConfigError
    void validate() const;
};

enum class ScenarioId { S1, S2, S3, S4 };
inline constexpr ScenarioId kScenarios[] = {ScenarioId::S1, ScenarioId::S2, ScenarioId::S3,
                                            ScenarioId::S4};
std::string_view to_string(ScenarioId s);
ScenarioId scenario_from_string(std::string_view s);

struct CampaignConfig {
    std::vector<ScenarioId> scenarios{std::begin(kScenarios), std::end(kScenarios)};
    std::vector<double> gaps{50.0, 70.0, 100.0};
    std::vector<Strategy> strategies{std::begin(kStrategies), std::end(kStrategies)};
    std::vector<AttackType> types{std::begin(kAttackTypes), std::end(kAttackTypes)};
    bool include_no_attack = false;
    int reps = 20;
    std::uint64_t master_seed = 2022;
    std::optional<ValuePolicy> policy_override;
    bool paired = true;
    int jobs = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct Config {
    SimConfig sim;
    CampaignConfig campaign;
};

// Starts from defaults; every key present overrides. Unknown keys are errors.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::string& path);
nlohmann::json config_to_json(const Config& c);

}  // namespace adsim
