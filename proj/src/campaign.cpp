#include "adsim/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "adsim/errors.hpp"

namespace adsim {

using nlohmann::json;

const char* const kSeedRule =
    "seed = mix64(master ^ mix64(key)), mix64 = splitmix64 finalizer; "
    "key = (strategy+1)<<48 | (type+1)<<40 | (scenario+1)<<32 | round(gap*10)<<16 | rep, "
    "strategy/type indices in declaration order, 15 = no attack, 14 = sweep; "
    "sensor noise uses mt19937_64(seed), attack schedule uses mt19937_64(mix64(seed ^ 0x5CED)); "
    "uniform = (next >> 11) * 2^-53, normal = Box-Muller (cos first, sin cached)";

const char* const kCsvHeader =
    "strategy,type,scenario,runs,alerts,hazards,accidents,hazards_no_alerts,lane_inv_rate,"
    "tth_mean,tth_std,prevented_hazards,new_hazards";

namespace {

constexpr int kNoAttackIdx = 15;
constexpr int kSweepIdx = 14;

int jobs_or_default(int jobs) {
    if (jobs > 0) return jobs;
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn,
                  const Progress& progress = {}) {
    std::atomic<std::size_t> next{0}, done{0};
    std::mutex mu;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!err) err = std::current_exception();
            }
            std::size_t d = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard<std::mutex> lk(mu);
                progress(d, n);
            }
        }
    };
    int nt = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string count_pct(int n, int total) {
    char buf[64];
    double pct = total > 0 ? 100.0 * n / total : 0.0;
    std::snprintf(buf, sizeof buf, "%d (%.1f%%)", n, pct);
    return buf;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

AttackSpec spec_for(const SimConfig& cfg, Strategy s, AttackType t, ValuePolicy p) {
    AttackSpec spec = make_spec(s, t, p);
    spec.limits = p == ValuePolicy::Fixed ? cfg.fixed : cfg.strategic;
    return spec;
}

std::uint64_t cell_key(int strategy_idx, int type_idx, ScenarioId sc, double gap, int rep) {
    return (std::uint64_t(strategy_idx + 1) << 48) | (std::uint64_t(type_idx + 1) << 40) |
           (std::uint64_t(static_cast<int>(sc) + 1) << 32) |
           ((std::uint64_t(std::llround(gap * 10.0)) & 0xFFFF) << 16) |
           (std::uint64_t(rep) & 0xFFFF);
}

std::vector<RunRecord> run_matrix(const SimConfig& cfg, const CampaignConfig& cc,
                                  const Progress& progress) {
    cfg.validate();
    cc.validate();

    struct Job {
        std::optional<AttackSpec> spec;
        RunRecord rec;
    };
    std::vector<Job> jobs;
    auto add = [&](int s_idx, int t_idx, std::optional<AttackSpec> spec) {
        for (ScenarioId sc : cc.scenarios)
            for (double gap : cc.gaps)
                for (int rep = 0; rep < cc.reps; ++rep) {
                    Job j;
                    j.spec = spec;
                    j.rec.strategy = spec ? std::string(to_string(spec->strategy)) : std::string(kNone);
                    j.rec.type = spec ? std::string(to_string(spec->type)) : std::string(kNone);
                    j.rec.policy = spec ? std::string(to_string(spec->policy)) : std::string(kNone);
                    j.rec.scenario = sc;
                    j.rec.gap = gap;
                    j.rec.rep = rep;
                    j.rec.seed = derive_seed(cc.master_seed, cell_key(s_idx, t_idx, sc, gap, rep));
                    jobs.push_back(std::move(j));
                }
    };
    if (cc.include_no_attack) add(kNoAttackIdx, kNoAttackIdx, std::nullopt);
    for (Strategy s : cc.strategies)
        for (AttackType t : cc.types) {
            ValuePolicy p = cc.policy_override ? *cc.policy_override : default_policy(s);
            add(static_cast<int>(s), static_cast<int>(t), spec_for(cfg, s, t, p));
        }

    SimConfig off_cfg = cfg;
    off_cfg.driver.mode = DriverMode::Off;

    parallel_for(
        jobs.size(), jobs_or_default(cc.jobs),
        [&](std::size_t i) {
            Job& j = jobs[i];
            Scenario sc = make_scenario(j.rec.scenario, j.rec.gap, cfg.scenario);
            j.rec.on = run_scenario(cfg, sc, j.spec, j.rec.seed);
            if (cc.paired) j.rec.off = run_scenario(off_cfg, sc, j.spec, j.rec.seed);
        },
        progress);

    std::vector<RunRecord> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(std::move(j.rec));
    return out;
}

std::optional<double> CellAggregate::tth_mean() const {
    if (tths.empty()) return std::nullopt;
    double s = 0.0;
    for (double v : tths) s += v;
    return s / tths.size();
}

std::optional<double> CellAggregate::tth_std() const {
    if (tths.empty()) return std::nullopt;
    if (tths.size() == 1) return 0.0;
    double m = *tth_mean(), s = 0.0;
    for (double v : tths) s += (v - m) * (v - m);
    return std::sqrt(s / (tths.size() - 1));
}

std::vector<CellAggregate> aggregate(const std::vector<RunRecord>& recs, bool by_type,
                                     bool by_scenario) {
    std::vector<CellAggregate> cells;
    for (const auto& r : recs) {
        std::string type = by_type ? r.type : "All";
        std::string scen = by_scenario ? std::string(to_string(r.scenario)) : "All";
        auto it = std::find_if(cells.begin(), cells.end(), [&](const CellAggregate& c) {
            return c.strategy == r.strategy && c.type == type && c.scenario == scen;
        });
        if (it == cells.end()) {
            cells.push_back({});
            it = cells.end() - 1;
            it->strategy = r.strategy;
            it->type = type;
            it->scenario = scen;
        }
        CellAggregate& c = *it;
        const RunResult& on = r.on;
        ++c.runs;
        c.alerts += on.any_alert();
        c.fcw += on.fcw_count();
        c.hazards += on.hazardous();
        c.accidents += on.any_accident();
        c.hazards_no_alerts += on.hazardous() && !on.any_alert();
        c.lane_inv_rate += on.lane_inv_rate();
        if (on.tth) c.tths.push_back(*on.tth);
        c.driver_alerted += on.driver_alerted.has_value();
        c.pre_activation += on.pre_activation_hazard;
        if (r.off) {
            c.prevented += r.off->hazardous() && !on.hazardous();
            c.fresh += on.hazardous() && !r.off->hazardous();
        }
    }
    for (auto& c : cells)
        if (c.runs) c.lane_inv_rate /= c.runs;
    return cells;
}

void write_csv(std::ostream& os, const std::vector<CellAggregate>& cells) {
    os << kCsvHeader << '\n';
    for (const auto& c : cells) {
        auto m = c.tth_mean(), s = c.tth_std();
        os << c.strategy << ',' << c.type << ',' << c.scenario << ',' << c.runs << ',' << c.alerts
           << ',' << c.hazards << ',' << c.accidents << ',' << c.hazards_no_alerts << ','
           << fmt("%.6f", c.lane_inv_rate) << ',' << (m ? fmt("%.4f", *m) : "") << ','
           << (s ? fmt("%.4f", *s) : "") << ',' << c.prevented << ',' << c.fresh << '\n';
    }
}

std::string csv_string(const std::vector<RunRecord>& recs) {
    std::ostringstream os;
    write_csv(os, aggregate(recs));
    return os.str();
}

void write_summary(std::ostream& os, const std::vector<RunRecord>& recs, const Config& cfg) {
    const bool paired = !recs.empty() && recs.front().off.has_value();
    os << "# adsim campaign summary\n";
    os << "# master_seed: " << cfg.campaign.master_seed << '\n';
    os << "# " << kSeedRule << '\n';
    os << "# runs: " << recs.size() << ", reps per cell: " << cfg.campaign.reps
       << ", driver: " << to_string(cfg.sim.driver.mode)
       << ", paired driver-off runs: " << (paired ? "yes" : "no") << '\n';
    if (cfg.campaign.policy_override)
        os << "# value policy forced to " << to_string(*cfg.campaign.policy_override) << '\n';
    os << '\n';

    auto table = [&](const std::vector<CellAggregate>& cells, bool with_type) {
        char line[512];
        std::snprintf(line, sizeof line, "%-13s %-21s %5s %-15s %-15s %-15s %-15s %9s %-13s %-15s %-15s\n",
                      "strategy", with_type ? "type" : "", "runs", "alerts", "hazards", "accidents",
                      "haz_no_alerts", "lane_inv/s", "tth_s", "prevented", "new");
        os << line;
        for (const auto& c : cells) {
            auto m = c.tth_mean(), s = c.tth_std();
            std::string tth = m ? fmt("%.2f", *m) + "+-" + fmt("%.2f", *s) : "-";
            int base = std::max(1, c.hazards + c.prevented);
            std::snprintf(line, sizeof line,
                          "%-13s %-21s %5d %-15s %-15s %-15s %-15s %9.3f %-13s %-15s %-15s\n",
                          c.strategy.c_str(), with_type ? c.type.c_str() : "", c.runs,
                          count_pct(c.alerts, c.runs).c_str(), count_pct(c.hazards, c.runs).c_str(),
                          count_pct(c.accidents, c.runs).c_str(),
                          count_pct(c.hazards_no_alerts, c.runs).c_str(), c.lane_inv_rate,
                          tth.c_str(), paired ? count_pct(c.prevented, base).c_str() : "-",
                          paired ? count_pct(c.fresh, c.runs).c_str() : "-");
            os << line;
        }
    };
    os << "== per strategy ==\n";
    table(aggregate(recs, false, false), false);
    os << "\n== per strategy and attack type ==\n";
    table(aggregate(recs, true, false), true);
    int fcw = 0;
    for (const auto& r : recs) fcw += r.on.fcw_count();
    os << "\nFCW events (driver on): " << fcw << '\n';
}

json to_json(const RunResult& r) {
    json hz = json::object(), ac = json::object(), al = json::array();
    for (const auto& [h, s] : r.hazards) hz[std::string(to_string(h))] = s;
    for (const auto& [a, s] : r.accidents) ac[std::string(to_string(a))] = s;
    for (const auto& a : r.alerts) al.push_back({std::string(to_string(a.kind)), a.timestep});
    return {{"hazards", hz},
            {"accidents", ac},
            {"alerts", al},
            {"lane_invasions", r.lane_invasions},
            {"elapsed", r.elapsed},
            {"steps", r.steps},
            {"activation", opt_json(r.activation)},
            {"first_hazard", opt_json(r.first_hazard)},
            {"tth", opt_json(r.tth)},
            {"pre_activation_hazard", r.pre_activation_hazard},
            {"driver_alerted", opt_json(r.driver_alerted)},
            {"driver_engaged", opt_json(r.driver_engaged)}};
}

RunResult run_result_from_json(const json& j) {
    RunResult r;
    for (auto& [k, v] : j.at("hazards").items()) {
        Hazard h = k == "H1" ? Hazard::H1 : k == "H2" ? Hazard::H2 : Hazard::H3;
        r.hazards[h] = v.get<int>();
    }
    for (auto& [k, v] : j.at("accidents").items()) {
        Accident a = k == "A1" ? Accident::A1 : k == "A2" ? Accident::A2 : Accident::A3;
        r.accidents[a] = v.get<int>();
    }
    for (const auto& a : j.at("alerts"))
        r.alerts.push_back({a.at(0).get<std::string>() == "FCW" ? AlertKind::FCW
                                                                : AlertKind::SteerSaturated,
                            a.at(1).get<int>()});
    r.lane_invasions = j.at("lane_invasions").get<int>();
    r.elapsed = j.at("elapsed").get<double>();
    r.steps = j.at("steps").get<int>();
    r.activation = opt_from(j, "activation");
    r.first_hazard = opt_from(j, "first_hazard");
    r.tth = opt_from(j, "tth");
    r.pre_activation_hazard = j.at("pre_activation_hazard").get<bool>();
    r.driver_alerted = opt_from(j, "driver_alerted");
    r.driver_engaged = opt_from(j, "driver_engaged");
    return r;
}

json to_json(const RunRecord& r) {
    json j = {{"strategy", r.strategy},
              {"type", r.type},
              {"policy", r.policy},
              {"scenario", to_string(r.scenario)},
              {"gap", r.gap},
              {"rep", r.rep},
              {"seed", r.seed},
              {"on", to_json(r.on)}};
    if (r.off) j["off"] = to_json(*r.off);
    return j;
}

RunRecord run_record_from_json(const json& j) {
    RunRecord r;
    r.strategy = j.at("strategy").get<std::string>();
    r.type = j.at("type").get<std::string>();
    r.policy = j.at("policy").get<std::string>();
    r.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    r.gap = j.at("gap").get<double>();
    r.rep = j.at("rep").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.on = run_result_from_json(j.at("on"));
    if (j.contains("off")) r.off = run_result_from_json(j.at("off"));
    return r;
}

void write_jsonl(std::ostream& os, const std::vector<RunRecord>& recs) {
    for (const auto& r : recs) os << to_json(r).dump() << '\n';
}

std::vector<RunRecord> read_jsonl(std::istream& is) {
    std::vector<RunRecord> out;
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(run_record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw ConfigError("run record line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

bool HazardMap::any() const {
    for (const auto& row : hazard)
        for (bool b : row)
            if (b) return true;
    return false;
}

namespace {

std::optional<std::pair<std::size_t, std::size_t>> span_of(const std::vector<bool>& row) {
    std::optional<std::pair<std::size_t, std::size_t>> s;
    for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i]) {
            if (!s) s = std::make_pair(i, i);
            s->second = i;
        }
    return s;
}

}  // namespace

bool HazardMap::contiguous() const {
    std::optional<std::pair<std::size_t, std::size_t>> prev;
    bool seen = false, gap_after = false;
    for (const auto& row : hazard) {
        auto s = span_of(row);
        if (!s) {
            if (seen) gap_after = true;
            continue;
        }
        if (gap_after) return false;
        for (std::size_t i = s->first; i <= s->second; ++i)
            if (!row[i]) return false;
        if (prev && (s->first > prev->first || s->second < prev->second)) return false;
        prev = s;
        seen = true;
    }
    return true;
}

bool HazardMap::has_min_duration_edge() const {
    if (hazard.empty() || !any()) return false;
    return !span_of(hazard.front()).has_value();
}

std::optional<double> HazardMap::min_hazard_duration() const {
    for (std::size_t d = 0; d < hazard.size(); ++d)
        if (span_of(hazard[d])) return durations[d];
    return std::nullopt;
}

std::optional<std::pair<double, double>> HazardMap::window(std::size_t row) const {
    if (row >= hazard.size()) return std::nullopt;
    auto s = span_of(hazard[row]);
    if (!s) return std::nullopt;
    double half = starts.size() > 1 ? 0.5 * (starts[1] - starts[0]) : 0.0;
    return std::make_pair(starts[s->first] - half, starts[s->second] + half);
}

bool HazardMap::inside(double t_a) const {
    if (hazard.empty()) return false;
    auto w = window(hazard.size() - 1);
    return w && t_a >= w->first - 1e-9 && t_a <= w->second + 1e-9;
}

HazardMap sweep_start_duration(const SimConfig& cfg, ScenarioId sc, double gap, AttackType type,
                               const std::vector<double>& starts,
                               const std::vector<double>& durations, ValuePolicy policy,
                               std::uint64_t master_seed, int jobs) {
    cfg.validate();
    for (double s : starts)
        if (s < cfg.attack.arm_begin - 1e-9 || s > cfg.attack.arm_end + 1e-9)
            throw ConfigError("sweep start outside the arming window");
    for (double d : durations)
        if (d < 0.0) throw ConfigError("sweep duration must be >= 0");

    HazardMap m;
    m.scenario = sc;
    m.gap = gap;
    m.type = type;
    m.starts = starts;
    m.durations = durations;
    m.hazard.assign(durations.size(), std::vector<bool>(starts.size(), false));
    m.tth.assign(durations.size(), std::vector<std::optional<double>>(starts.size()));

    // one seed for the whole map, so cells differ only in start and duration
    const std::uint64_t seed =
        derive_seed(master_seed, cell_key(kSweepIdx, static_cast<int>(type), sc, gap, 0));
    const Scenario scen = make_scenario(sc, gap, cfg.scenario);
    const std::size_t ns = starts.size();
    parallel_for(durations.size() * ns, jobs_or_default(jobs), [&](std::size_t i) {
        std::size_t d = i / ns, s = i % ns;
        AttackSpec spec = spec_for(cfg, Strategy::RandomStDur, type, policy);
        spec.forced = Schedule{starts[s], durations[d]};
        RunResult r = run_scenario(cfg, scen, spec, seed);
        m.hazard[d][s] = r.hazardous();
        m.tth[d][s] = r.tth;
    });
    return m;
}

void write_sweep_csv(std::ostream& os, const HazardMap& m) {
    os << "scenario,gap,type,start,duration,hazard,tth\n";
    for (std::size_t d = 0; d < m.durations.size(); ++d)
        for (std::size_t s = 0; s < m.starts.size(); ++s)
            os << to_string(m.scenario) << ',' << fmt("%g", m.gap) << ',' << to_string(m.type) << ','
               << fmt("%g", m.starts[s]) << ',' << fmt("%g", m.durations[d]) << ','
               << (m.hazard[d][s] ? 1 : 0) << ','
               << (m.tth[d][s] ? fmt("%.4f", *m.tth[d][s]) : "") << '\n';
}

std::string render_sweep(const HazardMap& m) {
    std::ostringstream os;
    os << to_string(m.scenario) << " gap " << m.gap << " m, " << to_string(m.type)
       << " (X = hazard), starts " << (m.starts.empty() ? 0.0 : m.starts.front()) << ".."
       << (m.starts.empty() ? 0.0 : m.starts.back()) << " s\n";
    for (std::size_t d = m.durations.size(); d-- > 0;) {
        os << fmt("%5.2f s ", m.durations[d]);
        for (bool b : m.hazard[d]) os << (b ? 'X' : '.');
        os << '\n';
    }
    return os.str();
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    try {
        if (spec.find(':') != std::string::npos) {
            std::istringstream ss(spec);
            std::string a, b, c;
            std::getline(ss, a, ':');
            std::getline(ss, b, ':');
            std::getline(ss, c, ':');
            double lo = std::stod(a), hi = std::stod(b), st = std::stod(c);
            if (st <= 0.0 || hi < lo) throw ConfigError("bad grid range " + spec);
            long n = static_cast<long>(std::floor((hi - lo) / st + 1e-9)) + 1;
            for (long i = 0; i < n; ++i) out.push_back(lo + i * st);
        } else {
            std::istringstream ss(spec);
            std::string tok;
            while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad grid " + spec);
    }
    if (out.empty()) throw ConfigError("empty grid " + spec);
    return out;
}

}  // namespace adsim
