#include "adsim/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include "adsim/errors.hpp"

namespace adsim {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kScenarioNames = {"S1", "S2", "S3", "S4"};

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

// Walks one JSON object; remembers which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    template <class T>
    void get(const char* key, T& out) {
        if (!j_.contains(key)) return;
        seen_.insert(key);
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(path_ + "." + key + ": " + e.what());
        }
    }

    void get_scaled(const char* key, double& out, double scale) {
        double v = out / scale;
        get(key, v);
        out = v * scale;
    }

    void sub(const char* key, const std::function<void(Reader&)>& f) {
        if (!j_.contains(key)) return;
        seen_.insert(key);
        Reader r(j_.at(key), path_ + "." + key);
        f(r);
        r.finish();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_limits(Reader& r, SafetyLimits& l) {
    r.get("limit_accel", l.limit_accel);
    r.get("limit_brake", l.limit_brake);
    r.get("limit_steer", l.limit_steer);
    r.get("cruise_overspeed_factor", l.cruise_overspeed_factor);
}

json limits_json(const SafetyLimits& l) {
    return {{"limit_accel", l.limit_accel},
            {"limit_brake", l.limit_brake},
            {"limit_steer", l.limit_steer},
            {"cruise_overspeed_factor", l.cruise_overspeed_factor}};
}

void check_limits(const SafetyLimits& l, const std::string& name) {
    require(l.limit_accel > 0.0, name + ".limit_accel must be > 0");
    require(l.limit_brake < 0.0, name + ".limit_brake must be < 0");
    require(l.limit_steer > 0.0, name + ".limit_steer must be > 0");
    require(l.cruise_overspeed_factor >= 1.0, name + ".cruise_overspeed_factor must be >= 1");
}

void read_sim(Reader& r, SimConfig& s) {
    r.get("dt", s.dt);
    r.get("steps", s.steps);
    r.sub("vehicle", [&](Reader& v) {
        v.get("width", s.vehicle.width);
        v.get("length", s.vehicle.length);
        v.get("wheelbase", s.vehicle.wheelbase);
    });
    r.sub("lane", [&](Reader& v) {
        v.get("lane_width", s.lane.lane_width);
        v.get("num_lanes", s.lane.num_lanes);
        v.get("curvature", s.lane.curvature);
        v.get("guardrail_offset", s.lane.guardrail_offset);
    });
    r.sub("acc", [&](Reader& v) {
        v.get("k_speed", s.acc.k_speed);
        v.get("k_gap", s.acc.k_gap);
        v.get("k_rs", s.acc.k_rs);
        v.get("follow_gap", s.acc.follow_gap);
    });
    r.sub("alc", [&](Reader& v) {
        v.get("k_offset", s.alc.k_offset);
        v.get("k_heading", s.alc.k_heading);
        v.get("k_feedforward", s.alc.k_feedforward);
        v.get("tau", s.alc.tau);
    });
    r.sub("limits", [&](Reader& v) {
        v.sub("adas", [&](Reader& w) { read_limits(w, s.adas); });
        v.sub("fixed", [&](Reader& w) { read_limits(w, s.fixed); });
        v.sub("strategic", [&](Reader& w) { read_limits(w, s.strategic); });
        v.get("fcw_brake", s.fcw_brake);
        v.get("saturation_window", s.saturation_window);
    });
    r.get("kalman_gain", s.kalman_gain);
    r.sub("context", [&](Reader& v) {
        v.get("t_safe", s.context.t_safe);
        v.get_scaled("beta1_mph", s.context.beta1, kMph);
        v.get_scaled("beta2_mph", s.context.beta2, kMph);
        v.get("edge_margin", s.context.edge_margin);
    });
    r.sub("attack", [&](Reader& v) {
        v.get("arm_begin", s.attack.arm_begin);
        v.get("arm_end", s.attack.arm_end);
        v.get("overspeed_margin", s.attack.overspeed_margin);
    });
    r.sub("driver", [&](Reader& v) {
        std::string mode(to_string(s.driver.mode));
        v.get("mode", mode);
        s.driver.mode = driver_mode_from_string(mode);
        v.get("reaction_time", s.driver.reaction_time);
        v.get("max_decel", s.driver.max_decel);
        v.get("anomaly_window_steps", s.driver.anomaly_window_steps);
        v.get("steer_limit", s.driver.steer_limit);
        v.get("steer_gain", s.driver.steer_gain);
        v.get("k_offset", s.driver.k_offset);
        v.get("k_heading", s.driver.k_heading);
        v.get("recenter_offset", s.driver.recenter_offset);
        v.get("recenter_heading", s.driver.recenter_heading);
    });
    r.sub("monitor", [&](Reader& v) {
        v.get("h1_hwt", s.monitor.h1_hwt);
        v.get("h2_speed", s.monitor.h2_speed);
        v.get("h2_lead_range", s.monitor.h2_lead_range);
        v.get("a2_dwell", s.monitor.a2_dwell);
        v.get("moving_speed", s.monitor.moving_speed);
    });
    r.sub("noise", [&](Reader& v) {
        v.get("speed", s.noise.speed);
        v.get("dist", s.noise.dist);
        v.get("rs", s.noise.rs);
        v.get("lane", s.noise.lane);
        v.get("radar_range", s.noise.radar_range);
    });
    r.sub("scenario", [&](Reader& v) {
        v.get_scaled("v_cruise_mph", s.scenario.v_cruise, kMph);
        v.get("ego_speed0", s.scenario.ego_speed0);
        v.get("ego_offset0", s.scenario.ego_offset0);
        v.get("ego_lane", s.scenario.ego_lane);
        v.get("ramp_start", s.scenario.ramp_start);
        v.get("ramp_duration", s.scenario.ramp_duration);
        v.get("straight", s.scenario.straight);
    });
}

template <class T, class F>
void read_list(Reader& r, const char* key, std::vector<T>& out, F parse) {
    std::vector<std::string> tmp;
    if (!r.has(key)) return;
    r.get(key, tmp);
    out.clear();
    for (const auto& n : tmp) out.push_back(parse(n));
}

void read_campaign(Reader& r, CampaignConfig& c) {
    read_list(r, "scenarios", c.scenarios, [](const std::string& n) { return scenario_from_string(n); });
    r.get("gaps", c.gaps);
    read_list(r, "strategies", c.strategies, [](const std::string& n) { return strategy_from_string(n); });
    read_list(r, "types", c.types, [](const std::string& n) { return attack_type_from_string(n); });
    r.get("include_no_attack", c.include_no_attack);
    r.get("reps", c.reps);
    r.get("master_seed", c.master_seed);
    std::string pol;
    r.get("policy_override", pol);
    if (!pol.empty()) c.policy_override = value_policy_from_string(pol);
    r.get("paired", c.paired);
    r.get("jobs", c.jobs);
}

}  // namespace

std::string_view to_string(ScenarioId s) { return kScenarioNames[static_cast<int>(s)]; }

ScenarioId scenario_from_string(std::string_view s) {
    for (int i = 0; i < 4; ++i)
        if (kScenarioNames[i] == s) return static_cast<ScenarioId>(i);
    throw ConfigError("unknown scenario: " + std::string(s));
}

void SimConfig::validate() const {
    require(dt > 0.0, "dt must be > 0");
    require(steps > 0, "steps must be > 0");
    require(vehicle.width > 0.0 && vehicle.length > 0.0 && vehicle.wheelbase > 0.0,
            "vehicle dimensions must be > 0");
    require(lane.num_lanes >= 1, "lane.num_lanes must be >= 1");
    require(lane.lane_width > vehicle.width, "lane_width must exceed vehicle width");
    require(lane.guardrail_offset >= 0.0, "guardrail_offset must be >= 0");
    require(std::isfinite(lane.curvature), "curvature must be finite");
    require(acc.follow_gap > 0.0, "acc.follow_gap must be > 0");
    require(alc.tau > 0.0, "alc.tau must be > 0");
    check_limits(adas, "limits.adas");
    check_limits(fixed, "limits.fixed");
    check_limits(strategic, "limits.strategic");
    require(fcw_brake < 0.0, "limits.fcw_brake must be < 0");
    require(saturation_window >= 1, "limits.saturation_window must be >= 1");
    require(kalman_gain >= 0.0 && kalman_gain <= 1.0, "kalman_gain must be in [0,1]");
    require(context.t_safe >= 2.0 && context.t_safe <= 3.0, "context.t_safe must be in [2,3] s");
    auto in_mph = [](double v) { return v >= 20.0 * kMph - 1e-9 && v <= 35.0 * kMph + 1e-9; };
    require(in_mph(context.beta1), "context.beta1 must be in [20,35] mph");
    require(in_mph(context.beta2), "context.beta2 must be in [20,35] mph");
    require(context.edge_margin >= 0.0, "context.edge_margin must be >= 0");
    require(attack.arm_begin >= 0.0 && attack.arm_begin < attack.arm_end,
            "attack arming window must satisfy 0 <= begin < end");
    require(attack.overspeed_margin >= 0.0, "attack.overspeed_margin must be >= 0");
    require(driver.reaction_time > 0.0, "driver.reaction_time must be > 0");
    require(driver.max_decel < 0.0, "driver.max_decel must be < 0");
    require(driver.anomaly_window_steps >= 1, "driver.anomaly_window_steps must be >= 1");
    require(monitor.h1_hwt > 0.0, "monitor.h1_hwt must be > 0");
    require(monitor.a2_dwell > 0.0, "monitor.a2_dwell must be > 0");
    require(noise.speed >= 0.0 && noise.dist >= 0.0 && noise.rs >= 0.0 && noise.lane >= 0.0,
            "noise sigmas must be >= 0");
    require(noise.radar_range > 0.0, "noise.radar_range must be > 0");
    require(scenario.v_cruise > 0.0, "scenario.v_cruise must be > 0");
    require(scenario.ego_speed0 >= 0.0, "scenario.ego_speed0 must be >= 0");
    require(scenario.ego_lane >= -1 && scenario.ego_lane < lane.num_lanes,
            "scenario.ego_lane out of range");
    require(scenario.ramp_duration > 0.0, "scenario.ramp_duration must be > 0");
}

void CampaignConfig::validate() const {
    require(reps >= 1, "campaign.reps must be >= 1");
    require(!scenarios.empty(), "campaign.scenarios must not be empty");
    require(!gaps.empty(), "campaign.gaps must not be empty");
    for (double g : gaps) require(g > 0.0, "campaign.gaps must be > 0");
    require(jobs >= 0, "campaign.jobs must be >= 0");
}

Config config_from_json(const json& j) {
    Config c;
    Reader r(j, "config");
    r.sub("sim", [&](Reader& s) { read_sim(s, c.sim); });
    r.sub("campaign", [&](Reader& s) { read_campaign(s, c.campaign); });
    r.finish();
    c.sim.validate();
    c.campaign.validate();
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path);
    json j;
    try {
        j = json::parse(f, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    return config_from_json(j);
}

json config_to_json(const Config& c) {
    const SimConfig& s = c.sim;
    json sim = {
        {"dt", s.dt},
        {"steps", s.steps},
        {"vehicle",
         {{"width", s.vehicle.width}, {"length", s.vehicle.length}, {"wheelbase", s.vehicle.wheelbase}}},
        {"lane",
         {{"lane_width", s.lane.lane_width},
          {"num_lanes", s.lane.num_lanes},
          {"curvature", s.lane.curvature},
          {"guardrail_offset", s.lane.guardrail_offset}}},
        {"acc",
         {{"k_speed", s.acc.k_speed},
          {"k_gap", s.acc.k_gap},
          {"k_rs", s.acc.k_rs},
          {"follow_gap", s.acc.follow_gap}}},
        {"alc",
         {{"k_offset", s.alc.k_offset},
          {"k_heading", s.alc.k_heading},
          {"k_feedforward", s.alc.k_feedforward},
          {"tau", s.alc.tau}}},
        {"limits",
         {{"adas", limits_json(s.adas)},
          {"fixed", limits_json(s.fixed)},
          {"strategic", limits_json(s.strategic)},
          {"fcw_brake", s.fcw_brake},
          {"saturation_window", s.saturation_window}}},
        {"kalman_gain", s.kalman_gain},
        {"context",
         {{"t_safe", s.context.t_safe},
          {"beta1_mph", s.context.beta1 / kMph},
          {"beta2_mph", s.context.beta2 / kMph},
          {"edge_margin", s.context.edge_margin}}},
        {"attack",
         {{"arm_begin", s.attack.arm_begin},
          {"arm_end", s.attack.arm_end},
          {"overspeed_margin", s.attack.overspeed_margin}}},
        {"driver",
         {{"mode", to_string(s.driver.mode)},
          {"reaction_time", s.driver.reaction_time},
          {"max_decel", s.driver.max_decel},
          {"anomaly_window_steps", s.driver.anomaly_window_steps},
          {"steer_limit", s.driver.steer_limit},
          {"steer_gain", s.driver.steer_gain},
          {"k_offset", s.driver.k_offset},
          {"k_heading", s.driver.k_heading},
          {"recenter_offset", s.driver.recenter_offset},
          {"recenter_heading", s.driver.recenter_heading}}},
        {"monitor",
         {{"h1_hwt", s.monitor.h1_hwt},
          {"h2_speed", s.monitor.h2_speed},
          {"h2_lead_range", s.monitor.h2_lead_range},
          {"a2_dwell", s.monitor.a2_dwell},
          {"moving_speed", s.monitor.moving_speed}}},
        {"noise",
         {{"speed", s.noise.speed},
          {"dist", s.noise.dist},
          {"rs", s.noise.rs},
          {"lane", s.noise.lane},
          {"radar_range", s.noise.radar_range}}},
        {"scenario",
         {{"v_cruise_mph", s.scenario.v_cruise / kMph},
          {"ego_speed0", s.scenario.ego_speed0},
          {"ego_offset0", s.scenario.ego_offset0},
          {"ego_lane", s.scenario.ego_lane},
          {"ramp_start", s.scenario.ramp_start},
          {"ramp_duration", s.scenario.ramp_duration},
          {"straight", s.scenario.straight}}},
    };
    const CampaignConfig& k = c.campaign;
    json camp = {{"gaps", k.gaps},
                 {"include_no_attack", k.include_no_attack},
                 {"reps", k.reps},
                 {"master_seed", k.master_seed},
                 {"paired", k.paired},
                 {"jobs", k.jobs}};
    for (auto s2 : k.scenarios) camp["scenarios"].push_back(to_string(s2));
    for (auto s2 : k.strategies) camp["strategies"].push_back(to_string(s2));
    for (auto t : k.types) camp["types"].push_back(to_string(t));
    if (k.policy_override) camp["policy_override"] = to_string(*k.policy_override);
    return {{"sim", sim}, {"campaign", camp}};
}

}  // namespace adsim
