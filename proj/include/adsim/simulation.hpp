#pragma once

#include <cstdint>
#include <optional>
#include <ostream>

#include "adsim/attack.hpp"
#include "adsim/can_codec.hpp"
#include "adsim/config.hpp"
#include "adsim/monitor.hpp"

namespace adsim {

struct Scenario {
    ScenarioId id = ScenarioId::S1;
    double gap = 50.0;         // m, initial bumper gap
    double lead_from = 0.0;    // m/s
    double lead_to = 0.0;      // m/s
    double ramp_start = 5.0;
    double ramp_duration = 10.0;

    double lead_speed(double t) const;
};

// S1 35 mph, S2 50 mph, S3 50 -> 35 mph, S4 35 -> 50 mph
Scenario make_scenario(ScenarioId id, double gap, const ScenarioParams& p = {});

// Optional per-run debug sinks.
struct RunTaps {
    std::ostream* bus_trace = nullptr;    // JSONL bus traffic
    std::ostream* attack_log = nullptr;   // JSONL activation / corruption / stop
    std::ostream* frame_trace = nullptr;  // ID#PAYLOAD per actuated frame
    std::ostream* driver_log = nullptr;   // JSONL driver events
    std::ostream* state_trace = nullptr;  // CSV ego/lead state every step
};

// Deterministic in (cfg, scenario, attack, seed).
RunResult run_scenario(const SimConfig& cfg, const Scenario& sc,
                       const std::optional<AttackSpec>& attack, std::uint64_t seed,
                       const RunTaps& taps = {}, const SignalLayout* layout = nullptr);

}  // namespace adsim
