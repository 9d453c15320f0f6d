// adsim command line: campaigns, single traced runs, sweeps, reports.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "adsim/campaign.hpp"
#include "adsim/errors.hpp"

using namespace adsim;
namespace fs = std::filesystem;

namespace {

template <class T, class F>
std::vector<T> names_to(const std::vector<std::string>& names, F parse) {
    std::vector<T> out;
    for (const auto& n : names) out.push_back(parse(n));
    return out;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    return f;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop ADAS attack simulator"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON config (defaults when omitted)");

    // campaign
    auto* run = app.add_subcommand("run", "run a strategy x type x scenario x gap matrix");
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> reps, jobs;
    std::vector<std::string> strategies, types, scenarios;
    std::vector<double> gaps;
    std::string policy, driver;
    bool no_attack = false, attack_free = false, unpaired = false, quiet = false;
    run->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
    run->add_option("--seed", seed, "master seed");
    run->add_option("--reps", reps, "repetitions per cell");
    run->add_option("-j,--jobs", jobs, "worker threads (0 = all cores)");
    run->add_option("--strategies", strategies, "ContextAware RandomStDur RandomSt RandomDur");
    run->add_option("--types", types, "attack types");
    run->add_option("--scenarios", scenarios, "S1..S4");
    run->add_option("--gaps", gaps, "initial gaps in metres");
    run->add_option("--policy", policy, "force Fixed or Strategic values for every strategy");
    run->add_option("--driver", driver, "alert, distracted or off");
    run->add_flag("--no-attack", no_attack, "include attack-free runs");
    run->add_flag("--attack-free", attack_free, "only attack-free runs");
    run->add_flag("--unpaired", unpaired, "skip the driver-off twin runs");
    run->add_flag("-q,--quiet", quiet, "no progress output");

    // one run with every trace
    auto* one = app.add_subcommand("single", "one run with bus, frame, attack and driver traces");
    std::string s_scen = "S1", s_strat = "ContextAware", s_type = "Acceleration", s_policy;
    double s_gap = 50.0;
    std::uint64_t s_seed = 1;
    std::string trace_dir = "trace";
    one->add_option("--scenario", s_scen)->capture_default_str();
    one->add_option("--gap", s_gap)->capture_default_str();
    one->add_option("--strategy", s_strat, "strategy or None")->capture_default_str();
    one->add_option("--type", s_type)->capture_default_str();
    one->add_option("--policy", s_policy);
    one->add_option("--driver", driver);
    one->add_option("--seed", s_seed)->capture_default_str();
    one->add_option("-o,--out", trace_dir)->capture_default_str();

    // start x duration sweep
    auto* sweep = app.add_subcommand("sweep", "start time x duration hazard map");
    std::string w_scen = "S1", w_type = "Acceleration", w_policy = "Fixed";
    std::string starts = "5:40:1", durs = "0.5:2.5:0.5", w_csv;
    std::vector<double> w_gaps{50.0, 70.0, 100.0};
    sweep->add_option("--scenario", w_scen)->capture_default_str();
    sweep->add_option("--type", w_type)->capture_default_str();
    sweep->add_option("--policy", w_policy)->capture_default_str();
    sweep->add_option("--gaps", w_gaps)->capture_default_str();
    sweep->add_option("--starts", starts, "a:b:step or list")->capture_default_str();
    sweep->add_option("--durations", durs, "a:b:step or list")->capture_default_str();
    sweep->add_option("--seed", seed);
    sweep->add_option("-j,--jobs", jobs);
    sweep->add_option("--csv", w_csv, "write cells here");

    // re-aggregate saved runs
    auto* report = app.add_subcommand("report", "aggregate a runs.jsonl file");
    std::string runs_path, csv_out;
    report->add_option("runs", runs_path, "runs.jsonl")->required();
    report->add_option("--csv", csv_out, "write the CSV here");

    auto* layout = app.add_subcommand("layout", "print or check a signal layout");
    std::string layout_path;
    layout->add_option("--check", layout_path, "DBC-lite file to validate");

    auto* dump = app.add_subcommand("config", "print the effective config as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = config_path.empty() ? Config{} : load_config(config_path);
        if (!driver.empty()) cfg.sim.driver.mode = driver_mode_from_string(driver);

        if (*dump) {
            std::cout << config_to_json(cfg).dump(2) << '\n';
            return 0;
        }

        if (*layout) {
            SignalLayout l = layout_path.empty() ? SignalLayout::default_layout()
                                                 : SignalLayout::load(layout_path);
            std::cout << l.to_text();
            return 0;
        }

        if (*run) {
            CampaignConfig& cc = cfg.campaign;
            if (seed) cc.master_seed = *seed;
            if (reps) cc.reps = *reps;
            if (jobs) cc.jobs = *jobs;
            if (!strategies.empty())
                cc.strategies = names_to<Strategy>(strategies, strategy_from_string);
            if (!types.empty()) cc.types = names_to<AttackType>(types, attack_type_from_string);
            if (!scenarios.empty())
                cc.scenarios = names_to<ScenarioId>(scenarios, scenario_from_string);
            if (!gaps.empty()) cc.gaps = gaps;
            if (!policy.empty()) cc.policy_override = value_policy_from_string(policy);
            if (no_attack) cc.include_no_attack = true;
            if (attack_free) {
                cc.include_no_attack = true;
                cc.strategies.clear();
                cc.types.clear();
            }
            if (unpaired) cc.paired = false;

            auto t0 = std::chrono::steady_clock::now();
            Progress prog;
            if (!quiet)
                prog = [](std::size_t d, std::size_t n) {
                    if (d % 100 == 0 || d == n) std::cerr << "\r" << d << "/" << n << std::flush;
                };
            auto recs = run_matrix(cfg.sim, cc, prog);
            if (!quiet) std::cerr << '\n';
            double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            fs::create_directories(out_dir);
            {
                auto f = open_out(fs::path(out_dir) / "runs.jsonl");
                write_jsonl(f, recs);
            }
            {
                auto f = open_out(fs::path(out_dir) / "results.csv");
                write_csv(f, aggregate(recs));
            }
            {
                auto f = open_out(fs::path(out_dir) / "summary.txt");
                write_summary(f, recs, cfg);
            }
            {
                auto f = open_out(fs::path(out_dir) / "config.json");
                f << config_to_json(cfg).dump(2) << '\n';
            }
            write_summary(std::cout, recs, cfg);
            std::cout << "\n" << recs.size() << " runs in " << secs << " s, written to " << out_dir
                      << '\n';
            return 0;
        }

        if (*one) {
            ScenarioId sc = scenario_from_string(s_scen);
            std::optional<AttackSpec> spec;
            if (s_strat != "None") {
                Strategy st = strategy_from_string(s_strat);
                ValuePolicy p = s_policy.empty() ? default_policy(st) : value_policy_from_string(s_policy);
                spec = spec_for(cfg.sim, st, attack_type_from_string(s_type), p);
            }
            fs::create_directories(trace_dir);
            auto bus = open_out(fs::path(trace_dir) / "bus.jsonl");
            auto atk = open_out(fs::path(trace_dir) / "attack.jsonl");
            auto frames = open_out(fs::path(trace_dir) / "frames.log");
            auto drv = open_out(fs::path(trace_dir) / "driver.jsonl");
            auto state = open_out(fs::path(trace_dir) / "state.csv");
            RunTaps taps{&bus, &atk, &frames, &drv, &state};
            RunResult r = run_scenario(cfg.sim, make_scenario(sc, s_gap, cfg.sim.scenario), spec,
                                       s_seed, taps);
            std::cout << to_json(r).dump(2) << '\n';
            return 0;
        }

        if (*sweep) {
            auto st = parse_grid(starts), du = parse_grid(durs);
            std::ofstream csv;
            if (!w_csv.empty()) csv = open_out(w_csv);
            bool header = true;
            for (double g : w_gaps) {
                HazardMap m = sweep_start_duration(
                    cfg.sim, scenario_from_string(w_scen), g, attack_type_from_string(w_type), st,
                    du, value_policy_from_string(w_policy), seed.value_or(cfg.campaign.master_seed),
                    jobs.value_or(cfg.campaign.jobs));
                std::cout << render_sweep(m);
                std::cout << "contiguous " << (m.contiguous() ? "yes" : "no")
                          << ", minimum-duration edge " << (m.has_min_duration_edge() ? "yes" : "no");
                if (auto w = m.window(du.size() - 1))
                    std::cout << ", window [" << w->first << ", " << w->second << "] s";
                std::cout << "\n\n";
                if (csv.is_open()) {
                    std::ostringstream os;
                    write_sweep_csv(os, m);
                    std::string s = os.str();
                    if (!header) s = s.substr(s.find('\n') + 1);
                    csv << s;
                    header = false;
                }
            }
            return 0;
        }

        if (*report) {
            std::ifstream in(runs_path);
            if (!in) throw ConfigError("cannot open " + runs_path);
            auto recs = read_jsonl(in);
            write_summary(std::cout, recs, cfg);
            if (!csv_out.empty()) {
                auto f = open_out(csv_out);
                write_csv(f, aggregate(recs));
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const LayoutError& e) {
        std::cerr << "layout error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
