#include "evrng/config.hpp"
#include "evrng/serialize.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace evrng;

namespace {

std::string error_of(std::string_view text)
{
    try {
        (void)parse_config(text, "cfg.json");
    }
    catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

ExperimentConfig random_config(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ExperimentConfig c;
    c.model = rng() % 2 ? "infection" : "clinic";
    c.mode = rng() % 2 ? Mode::keyed : Mode::stateful;
    c.scenario = rng() % 2 ? Scenario::baseline : Scenario::intervention;
    c.scenario_pair = {rng() % 2 ? Scenario::baseline : Scenario::intervention, Scenario::intervention};
    c.seed_stream = WorldSeed{rng(), rng()};
    if (rng() % 2)
        c.seed = WorldSeed{rng(), rng()};
    c.m = 2 + rng() % 5000;
    c.n_seeds = rng() % 5000;
    if (rng() % 2)
        c.observable.agent = 1 + rng() % 10;
    c.infection.n_agents = 1 + rng() % 30;
    c.infection.p_infect.clear();
    const bool uniform = rng() % 2;
    const double p = unit(rng);
    for (std::size_t i = 0; i < c.infection.n_agents; ++i)
        c.infection.p_infect.push_back(uniform ? p : unit(rng));
    c.infection.vaccine_efficacy = unit(rng);
    c.infection.vaccinated_agents = {1 + rng() % c.infection.n_agents};
    c.infection.placebo = rng() % 2;
    c.infection.incubation_rate = 0.01 + unit(rng);
    c.clinic = ClinicModelParams::make_default(1 + rng() % 10, 1 + rng() % 5, 1 + rng() % 3, 1 + rng() % 3, unit(rng));
    c.clinic.keying = rng() % 2 ? KeyingMode::slot : KeyingMode::dyad;
    c.clinic.worker_swap = rng() % 2;
    c.sobol.parameter = rng() % 2 ? "ve" : "placebo";
    c.sobol.grid = {unit(rng), unit(rng), unit(rng)};
    c.sobol.m_inner = 2 + rng() % 100;
    c.strict_ledger = rng() % 2;
    c.trace = rng() % 2;
    c.csv = rng() % 2;
    return c;
}

} // namespace

TEST(Config, DefaultsFromEmptyObject)
{
    const ExperimentConfig c = parse_config("{}");
    EXPECT_EQ(c, ExperimentConfig{});
    EXPECT_EQ(c.seed_stream.to_hex(), kDefaultSeedStream);
    EXPECT_EQ(c.infection.n_agents, 100u);
}

TEST(Config, RoundTripIsLossless)
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const ExperimentConfig c = random_config(rng);
        const std::string text = to_json(c).dump();
        const ExperimentConfig back = parse_config(text);
        ASSERT_EQ(back, c) << text;
        ASSERT_EQ(to_json(back).dump(), text);
    }
}

TEST(Config, ScalarRiskExpandsToAllAgents)
{
    const auto c = parse_config(R"({"infection": {"n_agents": 3, "p_infect": 0.2}})");
    EXPECT_EQ(c.infection.p_infect, (std::vector<double>{0.2, 0.2, 0.2}));
}

TEST(Config, ClinicLayoutShorthand)
{
    const auto c = parse_config(R"({"model": "clinic", "clinic": {"n_patients": 4, "n_workers": 2,
        "layout": {"days": 2, "slots_per_day": 1, "risk": 0.5}, "keying": "dyad"}})");
    EXPECT_EQ(c.clinic.encounters.size(), 8u);
    EXPECT_EQ(c.clinic.keying, KeyingMode::dyad);
    EXPECT_TRUE(std::holds_alternative<ClinicModelParams>(c.model_spec()));
}

TEST(Config, FieldPathDiagnostics)
{
    EXPECT_NE(error_of(R"({"infection": {"p_infect": [0.1, 2]}})").find("infection.p_infect"), std::string::npos);
    EXPECT_NE(error_of(R"({"infection": {"n_agents": 2, "p_infect": [0.1, "x"]}})").find("infection.p_infect[1]"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"mode": "fast"})").find("'mode'"), std::string::npos);
    EXPECT_NE(error_of(R"({"seed_stream": "abc"})").find("seed_stream"), std::string::npos);
    EXPECT_NE(error_of(R"({"colour": 1})").find("'colour': unknown field"), std::string::npos);
    EXPECT_NE(error_of(R"({"m": 1})").find("'m'"), std::string::npos);
    EXPECT_NE(error_of(R"({"sobol": {"parameter": "x"}})").find("sobol.parameter"), std::string::npos);
    EXPECT_NE(error_of(R"({"clinic": {"encounters": [[0, 1, 1, 1, 1]]}})").find("clinic.encounters[0]"),
              std::string::npos);
}

TEST(Config, SyntaxErrorsReportLineAndColumn)
{
    const std::string msg = error_of("{\n  \"mode\": \"keyed\",\n  \"m\": ,\n}");
    EXPECT_EQ(msg.rfind("cfg.json:3:", 0), 0u) << msg;
}

TEST(Config, DigestIgnoresScenarioOnly)
{
    ExperimentConfig a;
    ExperimentConfig b = a;
    b.scenario = Scenario::intervention;
    EXPECT_EQ(config_digest(a), config_digest(b));
    b.mode = Mode::stateful;
    EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(Serialize, RunOutcomeRoundTrip)
{
    RunOptions opts;
    opts.trace = true;
    for (Mode mode : {Mode::stateful, Mode::keyed}) {
        const RunOutcome r = simulate(InfectionModelParams{}, mode, Scenario::intervention, WorldSeed{3, 4}, opts);
        const nlohmann::json j = to_json(r);
        EXPECT_EQ(run_outcome_from_json(nlohmann::json::parse(j.dump())), r);
        EXPECT_FALSE(to_json(r, false).contains("draw_trace"));
        EXPECT_TRUE(j["noise_map"].is_array());
        EXPECT_TRUE(j["noise_map"][0].contains("u"));
    }
}

TEST(Serialize, CsvColumnsAreFixed)
{
    const std::vector<double> y0{1, 2, 3}, y1{2, 2, 4};
    const std::string csv = ate_csv(estimate_ate(y0, y1));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "m,delta_hat,var_y0,var_y1,cov,var_delta_hat,var_ite,cov_se");
    EXPECT_EQ(strata_csv({}), "stratum,count\nalways_infected,0\npreventable,0\nnever_infected,0\n");
}

TEST(Serialize, ShortestRoundTripDoubles)
{
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0 / 3.0), "0.6666666666666666");
    for (double x : {1e-300, 0.7839622630623282, 123456789.125})
        EXPECT_EQ(std::stod(format_double(x)), x);
}
