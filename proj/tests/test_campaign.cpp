#include <sstream>

#include <gtest/gtest.h>

#include "adsim/campaign.hpp"
#include "adsim/errors.hpp"

using namespace adsim;

TEST(Config, DefaultsRoundTrip) {
    Config c;
    auto j = config_to_json(c);
    Config back = config_from_json(j);
    EXPECT_EQ(config_to_json(back), j);
}

TEST(Config, OverridesAndErrors) {
    auto j = nlohmann::json::parse(R"({"sim": {"context": {"t_safe": 2.2, "beta1_mph": 30}},
                                       "campaign": {"reps": 3, "scenarios": ["S2"]}})");
    Config c = config_from_json(j);
    EXPECT_EQ(c.sim.context.t_safe, 2.2);
    EXPECT_NEAR(c.sim.context.beta1, 30 * kMph, 1e-12);
    EXPECT_EQ(c.campaign.reps, 3);
    ASSERT_EQ(c.campaign.scenarios.size(), 1u);
    EXPECT_EQ(c.campaign.scenarios[0], ScenarioId::S2);

    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"sim": {"tsafe": 2}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"sim": {"context": {"t_safe": 4}}})")),
                 ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"sim": {"dt": "fast"}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"campaign": {"strategies": ["X"]}})")),
                 ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"campaign": {"reps": 0}})")), ConfigError);
}

TEST(Scenario, LeadProfiles) {
    auto s3 = make_scenario(ScenarioId::S3, 70.0);
    EXPECT_NEAR(s3.lead_speed(0.0), 50 * kMph, 1e-12);
    EXPECT_NEAR(s3.lead_speed(10.0), 42.5 * kMph, 1e-12);
    EXPECT_NEAR(s3.lead_speed(30.0), 35 * kMph, 1e-12);
    auto s1 = make_scenario(ScenarioId::S1, 50.0);
    EXPECT_EQ(s1.lead_speed(0.0), s1.lead_speed(49.0));
}

TEST(Simulation, AttackFreeRunIsClean) {
    SimConfig cfg;
    auto r = run_scenario(cfg, make_scenario(ScenarioId::S1, 50.0), std::nullopt, 1);
    EXPECT_FALSE(r.hazardous());
    EXPECT_FALSE(r.any_accident());
    EXPECT_EQ(r.steps, 5000);
    EXPECT_FALSE(r.activation);
}

TEST(Simulation, SameSeedSameResult) {
    SimConfig cfg;
    auto spec = make_spec(Strategy::RandomStDur, AttackType::Acceleration);
    auto sc = make_scenario(ScenarioId::S3, 70.0);
    std::ostringstream a, b;
    RunTaps ta, tb;
    ta.state_trace = &a;
    tb.state_trace = &b;
    auto r1 = run_scenario(cfg, sc, spec, 77, ta);
    auto r2 = run_scenario(cfg, sc, spec, 77, tb);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(to_json(r1), to_json(r2));
    auto r3 = run_scenario(cfg, sc, spec, 78);
    EXPECT_NE(*r1.activation, *r3.activation);
}

TEST(Simulation, ContextAwareSteeringRightReachesH3Fast) {
    SimConfig cfg;
    auto r = run_scenario(cfg, make_scenario(ScenarioId::S1, 50.0),
                          make_spec(Strategy::ContextAware, AttackType::SteeringRight), 5);
    ASSERT_TRUE(r.activation);
    ASSERT_TRUE(r.tth);
    EXPECT_LT(*r.tth, 2.5);
    EXPECT_TRUE(r.hazards.count(Hazard::H3));
    EXPECT_FALSE(r.any_alert());
}

TEST(Simulation, TapsProduceLogs) {
    SimConfig cfg;
    std::ostringstream bus, atk, frames, drv;
    RunTaps t;
    t.bus_trace = &bus;
    t.attack_log = &atk;
    t.frame_trace = &frames;
    t.driver_log = &drv;
    auto spec = spec_for(cfg, Strategy::ContextAware, AttackType::Acceleration, ValuePolicy::Fixed);
    run_scenario(cfg, make_scenario(ScenarioId::S1, 50.0), spec, 3, t);
    EXPECT_NE(bus.str().find("\"radarState\""), std::string::npos);
    EXPECT_NE(atk.str().find("\"activate\""), std::string::npos);
    EXPECT_NE(frames.str().find("0E4#"), std::string::npos);
    EXPECT_NE(drv.str().find("\"engaged\""), std::string::npos);
}

namespace {

RunRecord rec(const char* strat, const char* type, bool on_h, bool off_h, std::optional<double> tth) {
    RunRecord r;
    r.strategy = strat;
    r.type = type;
    r.policy = "Fixed";
    r.on.elapsed = 50.0;
    if (on_h) {
        r.on.first_hazard = 10.0;
        r.on.hazards[Hazard::H1] = 1000;
    }
    r.on.tth = tth;
    r.off = RunResult{};
    r.off->elapsed = 50.0;
    if (off_h) r.off->first_hazard = 9.0;
    return r;
}

}  // namespace

TEST(Aggregate, PreventedAndNew) {
    std::vector<RunRecord> rs = {rec("ContextAware", "Acceleration", false, true, std::nullopt),
                                 rec("ContextAware", "Acceleration", true, true, 1.0),
                                 rec("ContextAware", "Acceleration", true, false, 2.0),
                                 rec("ContextAware", "Acceleration", false, false, std::nullopt)};
    rs[3].on.alerts.push_back({AlertKind::FCW, 5});
    auto cells = aggregate(rs);
    ASSERT_EQ(cells.size(), 1u);
    const auto& c = cells[0];
    EXPECT_EQ(c.runs, 4);
    EXPECT_EQ(c.hazards, 2);
    EXPECT_EQ(c.prevented, 1);
    EXPECT_EQ(c.fresh, 1);
    EXPECT_EQ(c.alerts, 1);
    EXPECT_EQ(c.fcw, 1);
    EXPECT_EQ(c.hazards_no_alerts, 2);
    EXPECT_DOUBLE_EQ(*c.tth_mean(), 1.5);
    EXPECT_NEAR(*c.tth_std(), 0.7071067811865476, 1e-12);

    std::ostringstream os;
    write_csv(os, cells);
    EXPECT_EQ(os.str(), std::string(kCsvHeader) +
                            "\nContextAware,Acceleration,S1,4,1,2,0,2,0.000000,1.5000,0.7071,1,1\n");
}

TEST(Aggregate, EmptyTthFieldsStayEmpty) {
    std::vector<RunRecord> rs = {rec("RandomSt", "SteeringLeft", false, false, std::nullopt)};
    std::ostringstream os;
    write_csv(os, aggregate(rs));
    EXPECT_NE(os.str().find(",0.000000,,,0,0\n"), std::string::npos);
}

TEST(Records, JsonlRoundTrip) {
    SimConfig cfg;
    CampaignConfig cc;
    cc.scenarios = {ScenarioId::S2};
    cc.gaps = {70.0};
    cc.strategies = {Strategy::RandomSt};
    cc.types = {AttackType::Deceleration, AttackType::SteeringRight};
    cc.include_no_attack = true;
    cc.reps = 2;
    auto recs = run_matrix(cfg, cc);
    ASSERT_EQ(recs.size(), 6u);
    EXPECT_EQ(recs[0].strategy, "None");
    std::stringstream ss;
    write_jsonl(ss, recs);
    auto back = read_jsonl(ss);
    ASSERT_EQ(back.size(), recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(to_json(back[i]), to_json(recs[i]));
    EXPECT_EQ(csv_string(back), csv_string(recs));
    std::istringstream bad("{\"strategy\": 1}\n");
    EXPECT_THROW(read_jsonl(bad), ConfigError);
}

TEST(Records, SummaryUsesCountAndPercent) {
    std::vector<RunRecord> rs = {rec("ContextAware", "Acceleration", true, true, 1.0),
                                 rec("ContextAware", "Acceleration", false, false, std::nullopt),
                                 rec("ContextAware", "Acceleration", false, false, std::nullopt)};
    std::ostringstream os;
    write_summary(os, rs, Config{});
    EXPECT_NE(os.str().find("1 (33.3%)"), std::string::npos);
    EXPECT_NE(os.str().find("master_seed: 2022"), std::string::npos);
}

TEST(Seeds, KeysAreDistinct) {
    std::set<std::uint64_t> seen;
    for (int s = 0; s < 4; ++s)
        for (int t = 0; t < 6; ++t)
            for (ScenarioId sc : kScenarios)
                for (double g : {50.0, 70.0, 100.0})
                    for (int r = 0; r < 20; ++r)
                        EXPECT_TRUE(seen.insert(derive_seed(2022, cell_key(s, t, sc, g, r))).second);
}

namespace {

HazardMap grid(std::vector<std::string> rows) {
    HazardMap m;
    for (std::size_t i = 0; i < rows[0].size(); ++i) m.starts.push_back(5.0 + i);
    for (std::size_t d = 0; d < rows.size(); ++d) {
        m.durations.push_back(0.5 * (d + 1));
        std::vector<bool> r;
        for (char c : rows[d]) r.push_back(c == 'X');
        m.hazard.push_back(r);
    }
    return m;
}

}  // namespace

TEST(HazardMapShape, ContiguousNested) {
    auto m = grid({"......", "..X...", ".XXX..", ".XXXX."});
    EXPECT_TRUE(m.contiguous());
    EXPECT_TRUE(m.has_min_duration_edge());
    EXPECT_EQ(*m.min_hazard_duration(), 1.0);
    auto w = m.window(3);
    EXPECT_DOUBLE_EQ(w->first, 5.5);
    EXPECT_DOUBLE_EQ(w->second, 9.5);
    EXPECT_TRUE(m.inside(9.4));
    EXPECT_FALSE(m.inside(9.6));
    EXPECT_FALSE(grid({"......", "X.X...", "XXX..."}).contiguous());
    EXPECT_FALSE(grid({"......", "..XX..", ".XX..."}).contiguous());
    EXPECT_FALSE(grid({"..X...", "......", "..X..."}).contiguous());
    EXPECT_FALSE(grid({"..X...", "..X..."}).has_min_duration_edge());
    EXPECT_FALSE(grid({"......", "......"}).any());
}

TEST(Grid, Parse) {
    auto a = parse_grid("5:40:1");
    EXPECT_EQ(a.size(), 36u);
    EXPECT_EQ(a.back(), 40.0);
    auto b = parse_grid("0.5:2.5:0.5");
    ASSERT_EQ(b.size(), 5u);
    EXPECT_DOUBLE_EQ(b[4], 2.5);
    EXPECT_EQ(parse_grid("1,2.5,7"), (std::vector<double>{1, 2.5, 7}));
    EXPECT_THROW(parse_grid("5:1:1"), ConfigError);
    EXPECT_THROW(parse_grid("a,b"), ConfigError);
    EXPECT_THROW(parse_grid("1:2:0"), ConfigError);
}

TEST(Sweep, RejectsStartsOutsideArming) {
    SimConfig cfg;
    EXPECT_THROW(sweep_start_duration(cfg, ScenarioId::S1, 50, AttackType::Acceleration, {2.0},
                                      {1.0}, ValuePolicy::Fixed, 1),
                 ConfigError);
}
