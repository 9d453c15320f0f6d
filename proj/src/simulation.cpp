#include "adsim/simulation.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "adsim/bus.hpp"
#include "adsim/control.hpp"
#include "adsim/driver.hpp"
#include "adsim/rng.hpp"

namespace adsim {

double Scenario::lead_speed(double t) const {
    if (t <= ramp_start) return lead_from;
    if (t >= ramp_start + ramp_duration) return lead_to;
    return lead_from + (lead_to - lead_from) * (t - ramp_start) / ramp_duration;
}

Scenario make_scenario(ScenarioId id, double gap, const ScenarioParams& p) {
    const double slow = 35.0 * kMph, fast = 50.0 * kMph;
    Scenario s;
    s.id = id;
    s.gap = gap;
    s.ramp_start = p.ramp_start;
    s.ramp_duration = p.ramp_duration;
    switch (id) {
        case ScenarioId::S1: s.lead_from = s.lead_to = slow; break;
        case ScenarioId::S2: s.lead_from = s.lead_to = fast; break;
        case ScenarioId::S3: s.lead_from = fast; s.lead_to = slow; break;
        case ScenarioId::S4: s.lead_from = slow; s.lead_to = fast; break;
    }
    return s;
}

RunResult run_scenario(const SimConfig& cfg, const Scenario& sc,
                       const std::optional<AttackSpec>& attack, std::uint64_t seed,
                       const RunTaps& taps, const SignalLayout* layout_in) {
    static const SignalLayout kDefaultLayout = SignalLayout::default_layout();
    const SignalLayout& layout = layout_in ? *layout_in : kDefaultLayout;

    const double dt = cfg.dt;
    const double vc = cfg.scenario.v_cruise;
    const double kappa = cfg.curvature();
    const double W = cfg.vehicle.width;
    const double L = cfg.vehicle.wheelbase;
    const int ego_lane = cfg.ego_lane();
    const double lane_c = cfg.lane.lane_center(ego_lane);
    LaneGeometry lane = cfg.lane;
    lane.curvature = kappa;

    Rng noise(seed);
    Rng sched_rng(mix64(seed ^ 0x5CEDULL));

    VehicleState ego;
    ego.y = lane_c + cfg.scenario.ego_offset0;
    ego.speed = cfg.scenario.ego_speed0;
    VehicleState lead;
    lead.x = sc.gap + cfg.vehicle.length;
    lead.y = lane_c;
    lead.speed = sc.lead_speed(0.0);

    MessageBus bus;
    if (taps.bus_trace) bus.set_trace(taps.bus_trace);
    Subscription adas_gps = bus.subscribe(Topic::GpsLocationExternal);
    Subscription adas_model = bus.subscribe(Topic::ModelV2);
    Subscription adas_radar = bus.subscribe(Topic::RadarState);

    std::optional<AttackEngine> engine;
    if (attack) {
        AttackParams ap = cfg.attack;
        ap.v_cruise = vc;
        ap.dt = dt;
        Schedule sched = schedule_baseline(attack->strategy, sched_rng, ap.arm_begin, ap.arm_end);
        engine.emplace(*attack, sched, cfg.context, ap);
        engine->attach(bus);
        if (taps.attack_log) engine->set_log(taps.attack_log);
    }
    SpeedEstimate est;
    est.kalman_gain = cfg.kalman_gain;
    est.v_hat = est.v_hat_prior = ego.speed;

    SteerSaturationTracker sat(cfg.saturation_window);
    SafetyLimits vehicle_fcw = cfg.adas;
    vehicle_fcw.limit_brake = cfg.fcw_brake;
    Driver driver(cfg.driver, cfg.adas, vc, dt);
    HazardMonitor monitor(cfg.monitor, lane, cfg.vehicle, ego_lane, dt);

    RunResult res;
    std::optional<int> act_step;
    bool last_engaged = false;
    std::vector<AlertEvent> alerts_now;

    if (taps.state_trace) *taps.state_trace << "t,x,y,heading,speed,steer,lead_x,lead_speed\n";

    int k = 0;
    for (; k < cfg.steps; ++k) {
        const double t = k * dt;
        lead.speed = sc.lead_speed(t);

        // sensors: four draws every step so paired runs stay aligned
        const double n_v = noise.normal(0.0, cfg.noise.speed);
        const double n_d = noise.normal(0.0, cfg.noise.dist);
        const double n_rs = noise.normal(0.0, cfg.noise.rs);
        const double n_l = noise.normal(0.0, cfg.noise.lane);
        const Headway truth = headway(ego, lead, cfg.vehicle.length);
        const bool in_range = truth.rel_dist < cfg.noise.radar_range;

        const double vm = std::max(0.0, ego.speed + n_v);
        const double ym = ego.y - lane_c + n_l;
        bus.publish(Topic::GpsLocationExternal, GpsPayload{vm}, k);
        bus.publish(Topic::ModelV2,
                    ModelV2Payload{-0.5 * lane.lane_width - ym, 0.5 * lane.lane_width - ym}, k);
        bus.publish(Topic::RadarState,
                    in_range ? RadarPayload{true, truth.rel_dist + n_d, truth.rs + n_rs}
                             : RadarPayload{false, 0.0, 0.0},
                    k);

        // ADAS
        double a_speed = 0.0, a_offset = 0.0;
        std::optional<LeadTrack> track;
        for (auto& m : adas_gps.drain()) a_speed = std::get<GpsPayload>(m.payload).speed;
        for (auto& m : adas_model.drain()) {
            const auto& p = std::get<ModelV2Payload>(m.payload);
            a_offset = -0.5 * (p.left_line + p.right_line);
        }
        for (auto& m : adas_radar.drain()) {
            const auto& p = std::get<RadarPayload>(m.payload);
            track.reset();
            if (p.lead_present) track = LeadTrack{p.rel_dist, p.rel_speed};
        }
        ControlCommand plan = acc_plan(a_speed, track, vc, cfg.acc, cfg.adas);
        const double raw_steer = alc_request(a_offset, ego.heading, ego.steer, kappa, L, cfg.alc, dt);
        plan.steer_delta = raw_steer;
        plan = enforce_safety_limits(plan, cfg.adas, a_speed, vc, dt);
        alerts_now.clear();
        if (auto a = sat.update(raw_steer, cfg.adas.limit_steer, k)) alerts_now.push_back(*a);
        bus.publish(Topic::CarControl, CarControlPayload{plan}, k);

        std::vector<CanFrame> frames = encode_command(plan, layout, static_cast<unsigned>(k));

        // attacker
        if (engine) {
            engine->poll();
            std::optional<ContextState> ctx = infer_context(engine->view(), W);
            if (ctx) est = kalman_update(est, ctx->speed);
            bool hazard_seen = false;
            if (act_step)
                for (const auto& [h, step] : monitor.hazards()) hazard_seen |= step >= *act_step;
            frames = engine->attack_step(frames, layout, ctx, est, last_engaged, hazard_seen, k);
            if (!act_step && engine->activation_time()) act_step = k;
        }
        ControlCommand actuated = merge_frames(frames, layout, plan);
        if (engine)
            predict_speed(est, actuated.brake < 0.0 ? actuated.brake : actuated.accel, dt);
        if (taps.frame_trace)
            for (const auto& f : frames) *taps.frame_trace << to_trace_line(f) << '\n';

        if (auto a = fcw_check(actuated, vehicle_fcw, k)) alerts_now.push_back(*a);
        res.alerts.insert(res.alerts.end(), alerts_now.begin(), alerts_now.end());

        // driver
        const bool was_alerted = driver.state().alerted;
        const bool was_engaged = driver.state().engaged;
        driver.observe(actuated, ego.speed, alerts_now, k);
        DriverScene scene;
        scene.speed = ego.speed;
        scene.lead_present = in_range;
        scene.rel_dist = truth.rel_dist;
        scene.rs = truth.rs;
        scene.lateral_offset = ego.y - lane_c;
        scene.heading = ego.heading;
        scene.steer_angle = ego.steer;
        scene.curvature = kappa;
        scene.wheelbase = L;
        ControlCommand final_cmd = driver.act(actuated, scene, k);
        const DriverState& ds = driver.state();
        if (taps.driver_log) {
            if (!was_alerted && ds.alerted)
                *taps.driver_log << nlohmann::json{{"t", t}, {"event", "alerted"},
                                                   {"cause", to_string(ds.cause)}}
                                        .dump()
                                 << '\n';
            if (ds.engaged)
                *taps.driver_log << nlohmann::json{{"t", t},
                                                   {"event", was_engaged ? "override" : "engaged"},
                                                   {"accel", final_cmd.accel},
                                                   {"brake", final_cmd.brake},
                                                   {"steer_delta", final_cmd.steer_delta}}
                                        .dump()
                                 << '\n';
        }
        last_engaged = ds.engaged;

        // plant
        ego = step_vehicle(ego, final_cmd, dt, lane, L);
        lead.x += lead.speed * dt;

        if (taps.state_trace)
            *taps.state_trace << t << ',' << ego.x << ',' << ego.y << ',' << ego.heading << ','
                              << ego.speed << ',' << ego.steer << ',' << lead.x << ','
                              << lead.speed << '\n';

        MonitorInput mi{ego, lead, true, vc};
        monitor.check_hazards(mi, k);
        monitor.check_accidents(mi, k);
        monitor.record_lane_invasion(ego);
        if (monitor.terminated()) {
            ++k;
            break;
        }
    }
    if (engine) engine->end_of_run();

    res.steps = k;
    res.elapsed = k * dt;
    res.hazards = monitor.hazards();
    res.accidents = monitor.accidents();
    res.lane_invasions = monitor.lane_invasions();
    if (engine) res.activation = engine->activation_time();

    std::optional<int> first_any, first_post;
    for (const auto& [h, step] : res.hazards) {
        if (!first_any || step < *first_any) first_any = step;
        if (act_step && step >= *act_step && (!first_post || step < *first_post)) first_post = step;
    }
    if (!attack) {
        if (first_any) res.first_hazard = *first_any * dt;
    } else {
        if (first_post) res.first_hazard = *first_post * dt;
        res.pre_activation_hazard = first_any && (!act_step || *first_any < *act_step);
    }
    res.tth = tth(res.activation, res.first_hazard);
    const DriverState& ds = driver.state();
    if (ds.alerted) res.driver_alerted = ds.alert_step * dt;
    if (ds.engaged) res.driver_engaged = ds.engage_step * dt;
    return res;
}

}  // namespace adsim
