#include "adsim/attack.hpp"

#include <algorithm>
#include <array>
#include <string>

#include <json.hpp>

#include "adsim/errors.hpp"

namespace adsim {

namespace {

constexpr std::array<std::string_view, 4> kStrategyNames = {"ContextAware", "RandomStDur",
                                                            "RandomSt", "RandomDur"};
constexpr std::array<std::string_view, 6> kTypeNames = {
    "Acceleration",  "Deceleration",         "SteeringLeft",
    "SteeringRight", "AccelerationSteering", "DecelerationSteering"};

template <class E, std::size_t N>
E from_names(const std::array<std::string_view, N>& names, std::string_view s, const char* what) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == s) return static_cast<E>(i);
    throw ConfigError(std::string("unknown ") + what + ": " + std::string(s));
}

bool longitudinal_accel(AttackType t) {
    return t == AttackType::Acceleration || t == AttackType::AccelerationSteering;
}
bool longitudinal_brake(AttackType t) {
    return t == AttackType::Deceleration || t == AttackType::DecelerationSteering;
}
bool combined(AttackType t) {
    return t == AttackType::AccelerationSteering || t == AttackType::DecelerationSteering;
}

}  // namespace

std::vector<ContextRule> default_rules() {
    return {{1, Action::Acceleration, HazardKind::H1},
            {2, Action::Deceleration, HazardKind::H2},
            {3, Action::SteeringLeft, HazardKind::H3},
            {4, Action::SteeringRight, HazardKind::H3}};
}

bool rule_holds(int rule_id, const ContextState& c, const ContextThresholds& th) {
    switch (rule_id) {
        case 1: return c.hwt <= th.t_safe && c.rs > 0.0;
        case 2: return c.hwt > th.t_safe && c.rs <= 0.0 && c.speed > th.beta1;
        case 3: return c.d_left <= th.edge_margin && c.speed > th.beta2;
        case 4: return c.d_right <= th.edge_margin && c.speed > th.beta2;
        default: return false;
    }
}

std::vector<RuleMatch> match_context(const ContextState& c, const std::vector<ContextRule>& rules,
                                     const ContextThresholds& th) {
    std::vector<RuleMatch> out;
    for (const auto& r : rules)
        if (rule_holds(r.rule_id, c, th)) out.push_back({r.rule_id, r.action});
    std::sort(out.begin(), out.end(),
              [](const RuleMatch& a, const RuleMatch& b) { return a.rule_id < b.rule_id; });
    return out;
}

std::string_view to_string(Strategy s) { return kStrategyNames[static_cast<int>(s)]; }
std::string_view to_string(AttackType t) { return kTypeNames[static_cast<int>(t)]; }
std::string_view to_string(ValuePolicy p) { return p == ValuePolicy::Fixed ? "Fixed" : "Strategic"; }

Strategy strategy_from_string(std::string_view s) {
    return from_names<Strategy>(kStrategyNames, s, "strategy");
}
AttackType attack_type_from_string(std::string_view s) {
    return from_names<AttackType>(kTypeNames, s, "attack type");
}
ValuePolicy value_policy_from_string(std::string_view s) {
    if (s == "Fixed") return ValuePolicy::Fixed;
    if (s == "Strategic") return ValuePolicy::Strategic;
    throw ConfigError("unknown value policy: " + std::string(s));
}

ValuePolicy default_policy(Strategy s) {
    return s == Strategy::ContextAware ? ValuePolicy::Strategic : ValuePolicy::Fixed;
}

bool context_started(Strategy s) {
    return s == Strategy::ContextAware || s == Strategy::RandomDur;
}

AttackSpec make_spec(Strategy s, AttackType t) { return make_spec(s, t, default_policy(s)); }

AttackSpec make_spec(Strategy s, AttackType t, ValuePolicy p) {
    AttackSpec spec;
    spec.strategy = s;
    spec.type = t;
    spec.policy = p;
    spec.limits = p == ValuePolicy::Fixed ? SafetyLimits::fixed() : SafetyLimits::strategic();
    return spec;
}

Schedule schedule_baseline(Strategy s, Rng& rng, double start_lo, double start_hi, double dur_lo,
                           double dur_hi) {
    // both draws always happen so every strategy consumes the stream equally
    double st = rng.uniform(start_lo, start_hi);
    double du = rng.uniform(dur_lo, dur_hi);
    switch (s) {
        case Strategy::RandomStDur: return {st, du};
        case Strategy::RandomSt: return {st, dur_hi};
        case Strategy::RandomDur: return {std::nullopt, du};
        case Strategy::ContextAware: break;
    }
    return {};
}

std::optional<ContextState> infer_context(const EavesdropView& v, double vehicle_width) {
    if (!v.gps) return std::nullopt;
    ContextState c;
    c.speed = std::max(0.0, v.gps->speed);
    if (v.radar && v.radar->lead_present) {
        c.lead_present = true;
        c.rs = v.radar->rel_speed;
        c.hwt = headway_from(v.radar->rel_dist, c.speed, c.speed - c.rs).hwt;
    }
    if (v.model) {
        double hw = 0.5 * vehicle_width;
        c.d_left = std::max(0.0, -v.model->left_line - hw);
        c.d_right = std::max(0.0, v.model->right_line - hw);
    }
    return c;
}

int nearer_edge_side(const ContextState& c) { return c.d_right < c.d_left ? 1 : -1; }

AttackValues fixed_values(AttackType t, const SafetyLimits& lim, int side) {
    AttackValues v;
    if (longitudinal_accel(t)) {
        v.accel = lim.limit_accel;
        v.brake = 0.0;
    }
    if (longitudinal_brake(t)) {
        v.accel = 0.0;
        v.brake = lim.limit_brake;
    }
    if (t == AttackType::SteeringLeft) v.steer_delta = -lim.limit_steer;
    if (t == AttackType::SteeringRight) v.steer_delta = lim.limit_steer;
    if (combined(t)) v.steer_delta = side * lim.limit_steer;
    return v;
}

AttackValues strategic_values(AttackType t, const SafetyLimits& lim, const SpeedEstimate& est,
                              double v_cruise, double dt, int side, double overspeed_margin) {
    AttackValues v = fixed_values(t, lim, side);
    if (v.accel && *v.accel > 0.0) {
        double cap = lim.cruise_overspeed_factor * v_cruise - overspeed_margin;
        if (est.v_hat + *v.accel * dt > cap) v.accel = std::max(0.0, (cap - est.v_hat) / dt);
    }
    return v;
}

ActivationDecision select_attack(const std::vector<RuleMatch>& matches, AttackType t,
                                 const ContextState& c) {
    Action want = Action::Acceleration;
    switch (t) {
        case AttackType::Acceleration:
        case AttackType::AccelerationSteering: want = Action::Acceleration; break;
        case AttackType::Deceleration:
        case AttackType::DecelerationSteering: want = Action::Deceleration; break;
        case AttackType::SteeringLeft: want = Action::SteeringLeft; break;
        case AttackType::SteeringRight: want = Action::SteeringRight; break;
    }
    for (const auto& m : matches) {
        if (m.action != want) continue;
        ActivationDecision d{true, m.rule_id, 1};
        if (t == AttackType::SteeringLeft) d.side = -1;
        if (combined(t)) d.side = nearer_edge_side(c);
        return d;
    }
    return {};
}

std::string_view to_string(StopCause c) {
    switch (c) {
        case StopCause::None: return "none";
        case StopCause::DriverEngaged: return "driver_engaged";
        case StopCause::DurationExpired: return "duration_expired";
        case StopCause::HazardReached: return "hazard_reached";
        case StopCause::RunEnd: return "run_end";
    }
    return "none";
}

AttackEngine::AttackEngine(const AttackSpec& spec, const Schedule& sched,
                           const ContextThresholds& th, const AttackParams& p,
                           std::vector<ContextRule> rules)
    : spec_(spec), sched_(spec.forced ? *spec.forced : sched), th_(th), p_(p),
      rules_(std::move(rules)) {}

void AttackEngine::attach(MessageBus& bus) {
    sub_gps_ = bus.subscribe(Topic::GpsLocationExternal);
    sub_model_ = bus.subscribe(Topic::ModelV2);
    sub_radar_ = bus.subscribe(Topic::RadarState);
}

void AttackEngine::poll() {
    if (sub_gps_)
        while (auto m = sub_gps_->next()) view_.gps = std::get<GpsPayload>(m->payload);
    if (sub_model_)
        while (auto m = sub_model_->next()) view_.model = std::get<ModelV2Payload>(m->payload);
    if (sub_radar_)
        while (auto m = sub_radar_->next()) view_.radar = std::get<RadarPayload>(m->payload);
}

std::vector<CanFrame> AttackEngine::attack_step(const std::vector<CanFrame>& frames,
                                                const SignalLayout& layout,
                                                const std::optional<ContextState>& ctx,
                                                const SpeedEstimate& est, bool driver_engaged,
                                                bool hazard_seen, int step) {
    const double t = step * p_.dt;
    const bool armed = t >= p_.arm_begin - 1e-9 && t <= p_.arm_end + 1e-9;

    if (!active_ && !done_ && armed) {
        ActivationDecision d;
        if (sched_.start) {
            if (t >= *sched_.start - 1e-9) {
                d.activate = true;
                if (spec_.type == AttackType::SteeringLeft) d.side = -1;
                if (combined(spec_.type) && ctx) d.side = nearer_edge_side(*ctx);
            }
        } else if (ctx) {
            d = select_attack(match_context(*ctx, rules_, th_), spec_.type, *ctx);
        }
        if (d.activate) {
            active_ = true;
            t_a_ = t;
            side_ = d.side;
            if (log_)
                *log_ << nlohmann::json{{"t", t}, {"event", "activate"}, {"rule", d.rule_id},
                                        {"side", d.side}}
                             .dump()
                      << '\n';
        }
    }

    if (active_) {
        StopCause c = StopCause::None;
        if (driver_engaged)
            c = StopCause::DriverEngaged;
        else if (sched_.duration && t >= *t_a_ + *sched_.duration - 1e-9)
            c = StopCause::DurationExpired;
        else if (!sched_.duration && hazard_seen)
            c = StopCause::HazardReached;
        if (c != StopCause::None) {
            active_ = false;
            done_ = true;
            cause_ = c;
            if (log_)
                *log_ << nlohmann::json{{"t", t}, {"event", "stop"}, {"cause", to_string(c)}}.dump()
                      << '\n';
        }
    }

    if (!active_) return frames;

    AttackValues v = spec_.policy == ValuePolicy::Strategic
                         ? strategic_values(spec_.type, spec_.limits, est, p_.v_cruise, p_.dt,
                                            side_, p_.overspeed_margin)
                         : fixed_values(spec_.type, spec_.limits, side_);

    std::vector<CanFrame> out = frames;
    for (auto& f : out) {
        const MessageDef* m = layout.find(f.id);
        if (!m) continue;
        if (v.accel && m->find(kSigAccel)) f = corrupt_frame(f, kSigAccel, *v.accel, layout);
        if (v.brake && m->find(kSigBrake)) f = corrupt_frame(f, kSigBrake, *v.brake, layout);
        if (v.steer_delta && m->find(kSigSteer))
            f = corrupt_frame(f, kSigSteer, *v.steer_delta, layout);
    }
    if (log_) {
        nlohmann::json j{{"t", t}, {"event", "corrupt"}};
        if (v.accel) j["accel"] = *v.accel;
        if (v.brake) j["brake"] = *v.brake;
        if (v.steer_delta) j["steer_delta"] = *v.steer_delta;
        *log_ << j.dump() << '\n';
    }
    return out;
}

void AttackEngine::end_of_run() {
    if (!active_) return;
    active_ = false;
    done_ = true;
    cause_ = StopCause::RunEnd;
}

}  // namespace adsim
