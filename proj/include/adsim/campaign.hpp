#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adsim/config.hpp"
#include "adsim/simulation.hpp"

namespace adsim {

inline constexpr std::string_view kNone = "None";

// One run of the matrix (plus its driver-off twin when paired).
struct RunRecord {
    std::string strategy;  // "None" for attack-free
    std::string type;
    std::string policy;
    ScenarioId scenario = ScenarioId::S1;
    double gap = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    RunResult on;
    std::optional<RunResult> off;
};

AttackSpec spec_for(const SimConfig& cfg, Strategy s, AttackType t, ValuePolicy p);

// Stable key of a matrix cell; seed = derive_seed(master, key).
std::uint64_t cell_key(int strategy_idx, int type_idx, ScenarioId sc, double gap, int rep);
extern const char* const kSeedRule;

using Progress = std::function<void(std::size_t done, std::size_t total)>;

std::vector<RunRecord> run_matrix(const SimConfig& cfg, const CampaignConfig& cc,
                                  const Progress& progress = {});

struct CellAggregate {
    std::string strategy, type, scenario;
    int runs = 0;
    int alerts = 0;             // runs with at least one ADAS alert
    int fcw = 0;                // FCW events
    int hazards = 0;
    int accidents = 0;
    int hazards_no_alerts = 0;
    double lane_inv_rate = 0.0; // mean over runs, per second
    std::vector<double> tths;
    int prevented = 0;
    int fresh = 0;              // new hazards with the driver on
    int driver_alerted = 0;
    int pre_activation = 0;

    std::optional<double> tth_mean() const;
    std::optional<double> tth_std() const;
};

// scenario == "" groups over scenarios; type == "" groups over types.
std::vector<CellAggregate> aggregate(const std::vector<RunRecord>& recs, bool by_type = true,
                                     bool by_scenario = true);

extern const char* const kCsvHeader;
void write_csv(std::ostream& os, const std::vector<CellAggregate>& cells);
std::string csv_string(const std::vector<RunRecord>& recs);
void write_summary(std::ostream& os, const std::vector<RunRecord>& recs, const Config& cfg);

nlohmann::json to_json(const RunResult& r);
RunResult run_result_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);
void write_jsonl(std::ostream& os, const std::vector<RunRecord>& recs);
std::vector<RunRecord> read_jsonl(std::istream& is);

struct HazardMap {
    ScenarioId scenario = ScenarioId::S1;
    double gap = 0.0;
    AttackType type = AttackType::Acceleration;
    std::vector<double> starts;
    std::vector<double> durations;
    std::vector<std::vector<bool>> hazard;  // [duration][start]
    std::vector<std::vector<std::optional<double>>> tth;

    bool any() const;
    // each row is one contiguous run, non-empty rows are consecutive and
    // each longer duration covers the shorter one's span
    bool contiguous() const;
    // shortest row empty, some longer row hazardous
    bool has_min_duration_edge() const;
    std::optional<double> min_hazard_duration() const;
    // hazardous start span of a row, widened by half a grid step each side
    std::optional<std::pair<double, double>> window(std::size_t row) const;
    bool inside(double t_a) const;  // against the longest-duration row
};

HazardMap sweep_start_duration(const SimConfig& cfg, ScenarioId sc, double gap, AttackType type,
                               const std::vector<double>& starts,
                               const std::vector<double>& durations, ValuePolicy policy,
                               std::uint64_t master_seed, int jobs = 0);

void write_sweep_csv(std::ostream& os, const HazardMap& m);
std::string render_sweep(const HazardMap& m);

// Parses "a:b:step" or "a,b,c".
std::vector<double> parse_grid(const std::string& spec);

}  // namespace adsim
