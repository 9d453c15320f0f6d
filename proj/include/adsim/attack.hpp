#pragma once

#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "adsim/bus.hpp"
#include "adsim/can_codec.hpp"
#include "adsim/control.hpp"
#include "adsim/rng.hpp"
#include "adsim/sim_core.hpp"

namespace adsim {

struct ContextState {
    double hwt = kInf;
    double rs = 0.0;
    double speed = 0.0;
    double d_left = 0.0;
    double d_right = 0.0;
    bool lead_present = false;
};

enum class Action { Acceleration, Deceleration, SteeringLeft, SteeringRight };
enum class HazardKind { H1, H2, H3 };

struct ContextRule {
    int rule_id;
    Action action;
    HazardKind hazard;
};

struct ContextThresholds {
    double t_safe = 2.5;
    double beta1 = 25.0 * kMph;
    double beta2 = 25.0 * kMph;
    double edge_margin = 0.1;  // m, lane-edge proximity for rules 3/4
};

struct RuleMatch {
    int rule_id;
    Action action;
    bool operator==(const RuleMatch&) const = default;
};

std::vector<ContextRule> default_rules();
bool rule_holds(int rule_id, const ContextState& c, const ContextThresholds& th);
std::vector<RuleMatch> match_context(const ContextState& c, const std::vector<ContextRule>& rules,
                                     const ContextThresholds& th);

enum class Strategy { ContextAware, RandomStDur, RandomSt, RandomDur };
enum class AttackType {
    Acceleration,
    Deceleration,
    SteeringLeft,
    SteeringRight,
    AccelerationSteering,
    DecelerationSteering
};
enum class ValuePolicy { Fixed, Strategic };

inline constexpr Strategy kStrategies[] = {Strategy::ContextAware, Strategy::RandomStDur,
                                           Strategy::RandomSt, Strategy::RandomDur};
inline constexpr AttackType kAttackTypes[] = {
    AttackType::Acceleration,  AttackType::Deceleration,         AttackType::SteeringLeft,
    AttackType::SteeringRight, AttackType::AccelerationSteering, AttackType::DecelerationSteering};

std::string_view to_string(Strategy s);
std::string_view to_string(AttackType t);
std::string_view to_string(ValuePolicy p);
Strategy strategy_from_string(std::string_view s);
AttackType attack_type_from_string(std::string_view s);
ValuePolicy value_policy_from_string(std::string_view s);

// value set that goes with a strategy by default
ValuePolicy default_policy(Strategy s);
bool context_started(Strategy s);

struct Schedule {
    std::optional<double> start;     // absent = context-triggered
    std::optional<double> duration;  // absent = until hazard / engagement / run end
};

struct AttackSpec {
    Strategy strategy = Strategy::ContextAware;
    AttackType type = AttackType::Acceleration;
    ValuePolicy policy = ValuePolicy::Strategic;
    SafetyLimits limits = SafetyLimits::strategic();
    // when set, replaces the sampled schedule (used by the sweep)
    std::optional<Schedule> forced;
};

AttackSpec make_spec(Strategy s, AttackType t);
AttackSpec make_spec(Strategy s, AttackType t, ValuePolicy p);

Schedule schedule_baseline(Strategy s, Rng& rng, double start_lo = 5.0, double start_hi = 40.0,
                           double dur_lo = 0.5, double dur_hi = 2.5);

// Reads the latest eavesdropped payloads. No gps yet -> nullopt.
struct EavesdropView {
    std::optional<GpsPayload> gps;
    std::optional<ModelV2Payload> model;
    std::optional<RadarPayload> radar;
};
std::optional<ContextState> infer_context(const EavesdropView& v, double vehicle_width);

// Attacked channel values. Unset channels are not touched.
struct AttackValues {
    std::optional<double> accel;
    std::optional<double> brake;
    std::optional<double> steer_delta;
};

// +1 = right, -1 = left
int nearer_edge_side(const ContextState& c);

AttackValues fixed_values(AttackType t, const SafetyLimits& lim, int side);
// Box-boundary values, with accel reduced so the one-step prediction stays
// at or below factor*v_cruise - margin (never below zero).
AttackValues strategic_values(AttackType t, const SafetyLimits& lim, const SpeedEstimate& est,
                              double v_cruise, double dt, int side, double overspeed_margin = 0.0);

struct ActivationDecision {
    bool activate = false;
    int rule_id = 0;
    int side = 1;
};

// Which rule has to match for a type to activate, given the matches.
ActivationDecision select_attack(const std::vector<RuleMatch>& matches, AttackType t,
                                 const ContextState& c);

enum class StopCause { None, DriverEngaged, DurationExpired, HazardReached, RunEnd };
std::string_view to_string(StopCause c);

struct AttackParams {
    double arm_begin = 5.0;
    double arm_end = 40.0;
    double overspeed_margin = 0.2;
    double v_cruise = 60.0 * kMph;
    double dt = 0.01;
};

class AttackEngine {
public:
    AttackEngine(const AttackSpec& spec, const Schedule& sched, const ContextThresholds& th,
                 const AttackParams& p, std::vector<ContextRule> rules = default_rules());

    // Eavesdropping: subscribe to the three sensor topics on `bus`.
    void attach(MessageBus& bus);
    // Pulls pending messages into the current view.
    void poll();
    const EavesdropView& view() const { return view_; }

    // One control cycle. `frames` are the ADAS frames about to go out.
    // Returns frames (corrupted or byte-identical).
    std::vector<CanFrame> attack_step(const std::vector<CanFrame>& frames, const SignalLayout& layout,
                                      const std::optional<ContextState>& ctx,
                                      const SpeedEstimate& est, bool driver_engaged,
                                      bool hazard_seen, int step);

    // marks a still-running attack as ended by the run
    void end_of_run();

    bool active() const { return active_; }
    bool finished() const { return done_; }
    std::optional<double> activation_time() const { return t_a_; }
    StopCause stop_cause() const { return cause_; }
    const Schedule& schedule() const { return sched_; }

    void set_log(std::ostream* os) { log_ = os; }

private:
    AttackSpec spec_;
    Schedule sched_;
    ContextThresholds th_;
    AttackParams p_;
    std::vector<ContextRule> rules_;

    std::optional<Subscription> sub_gps_, sub_model_, sub_radar_;
    EavesdropView view_;

    bool active_ = false;
    bool done_ = false;
    int side_ = 1;
    std::optional<double> t_a_;
    StopCause cause_ = StopCause::None;
    std::ostream* log_ = nullptr;
};

}  // namespace adsim
