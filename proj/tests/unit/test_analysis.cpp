#include "evrng/analysis.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace evrng;
using evrng::test::oracle;

namespace {

const WorldSeed kStream = WorldSeed::from_hex("243f6a8885a308d313198a2e03707344");

InfectionModelParams toy()
{
    InfectionModelParams p;
    p.n_agents = 2;
    p.p_infect = {0.3, 0.3};
    return p;
}

RunOutcome traced(const InfectionModelParams& p, Mode mode, Scenario s, const WorldSeed& seed)
{
    RunOptions opts;
    opts.trace = true;
    return simulate(p, mode, s, seed, opts);
}

} // namespace

TEST(Placebo, KeyedNeverDiverges)
{
    const PlaceboReport r = placebo_experiment(300, InfectionModelParams{}, Mode::keyed, kStream, 4);
    EXPECT_EQ(r.n_seeds, 300u);
    EXPECT_EQ(r.n_divergent, 0u);
    EXPECT_EQ(r.n_latent_divergent, 0u);
    for (const auto& d : r.seeds)
        EXPECT_FALSE(d.first_mismatch);
}

TEST(Placebo, StatefulDivergesAndLocatesFirstMismatch)
{
    const PlaceboReport r = placebo_experiment(100, InfectionModelParams{}, Mode::stateful, kStream);
    EXPECT_EQ(r.n_divergent, 100u);
    EXPECT_LE(r.n_divergent, r.n_seeds);
    for (const auto& d : r.seeds) {
        ASSERT_TRUE(d.first_mismatch);
        // The efficacy check for agent 1 consumes draw 1, so agent 1's infection draw moves.
        EXPECT_EQ(d.first_mismatch->event, "infection(1)");
        EXPECT_EQ(d.first_mismatch->position_baseline, 1u);
        EXPECT_EQ(d.first_mismatch->position_placebo, 2u);
    }
}

TEST(Placebo, EmptyReport)
{
    const PlaceboReport r = placebo_experiment(0, InfectionModelParams{}, Mode::stateful, kStream);
    EXPECT_EQ(r.n_seeds, 0u);
    EXPECT_EQ(r.n_divergent, 0u);
    EXPECT_TRUE(r.seeds.empty());
}

TEST(Placebo, SeedsComeFromPlaceboNamespace)
{
    const PlaceboReport r = placebo_experiment(3, InfectionModelParams{}, Mode::keyed, kStream);
    for (const auto& d : r.seeds)
        EXPECT_EQ(d.seed, derive_seed(kStream, "placebo", d.index));
}

TEST(VarianceComparison, ArmsPopulatedAndReproducible)
{
    const VarianceComparison a = variance_comparison(200, InfectionModelParams{}, {}, kStream, 4);
    const VarianceComparison b = variance_comparison(200, InfectionModelParams{}, {}, kStream, 1);
    for (const AteReport* r : {&a.independent, &a.crn_stateful, &a.crn_keyed}) {
        EXPECT_EQ(r->m, 200u);
        EXPECT_NEAR(r->var_delta_hat, (r->var_y0 + r->var_y1 - 2 * r->cov) / r->m, 1e-12);
    }
    EXPECT_EQ(a.crn_keyed.delta_hat, b.crn_keyed.delta_hat);
    EXPECT_EQ(a.independent.cov, b.independent.cov);
    EXPECT_EQ(a.crn_stateful.var_delta_hat, b.crn_stateful.var_delta_hat);
    EXPECT_EQ(a.keyed_le_independent, a.crn_keyed.var_delta_hat <= a.independent.var_delta_hat);
    EXPECT_THROW(variance_comparison(99, InfectionModelParams{}, {}, kStream), std::invalid_argument);
}

TEST(Sobol, KeyedNullParameterIsExactlyZero)
{
    const std::vector<double> grid{0.0, 1.0};
    const SobolReport r = sobol_first_order(InfectionModelParams{}, "placebo", grid, 300, Mode::keyed, kStream, 4);
    EXPECT_EQ(r.conditional_means[0], r.conditional_means[1]);
    EXPECT_EQ(r.v_i, 0.0);
    ASSERT_TRUE(r.s_i);
    EXPECT_EQ(*r.s_i, 0.0);
}

TEST(Sobol, StatefulNullParameterMatchesOracle)
{
    const std::vector<double> grid{0.0, 1.0};
    const SobolReport r = sobol_first_order(InfectionModelParams{}, "placebo", grid, 200, Mode::stateful, kStream);
    const auto& exp = oracle()["sobol_stateful_placebo_200"];
    EXPECT_DOUBLE_EQ(r.conditional_means[0], exp["cond_means"][0].get<double>());
    EXPECT_DOUBLE_EQ(r.conditional_means[1], exp["cond_means"][1].get<double>());
    EXPECT_NEAR(r.v_i, exp["v_i"].get<double>(), 1e-12);
    EXPECT_NEAR(r.total_variance, exp["total"].get<double>(), 1e-9);
    EXPECT_GT(r.v_i, 0.0);
}

TEST(Sobol, EfficacyGridSeparatesByProtectedCohort)
{
    InfectionModelParams p;
    p.vaccinated_agents.clear();
    for (std::size_t i = 1; i <= 20; ++i)
        p.vaccinated_agents.push_back(i);
    const std::vector<double> grid{0.0, 1.0};
    const std::size_t m = 4000;
    const SobolReport r = sobol_first_order(p, "ve", grid, m, Mode::keyed, kStream, 4);
    // Expected protected count: 20 agents at risk 0.3.
    const double expected = 20 * 0.3;
    const double se = std::sqrt(20 * 0.3 * 0.7 / m);
    EXPECT_NEAR(r.conditional_means[0] - r.conditional_means[1], expected, 3 * se);
    EXPECT_NEAR(r.v_i, std::pow((r.conditional_means[0] - r.conditional_means[1]) / 2, 2), 1e-12);
}

TEST(Sobol, UndefinedIndexWhenTotalVarianceVanishes)
{
    const std::vector<double> grid{0.0, 0.0};
    const SobolReport r = sobol_first_order(InfectionModelParams{}, "p_infect", grid, 10, Mode::keyed, kStream);
    EXPECT_EQ(r.total_variance, 0.0);
    EXPECT_FALSE(r.s_i);
    EXPECT_FALSE(r.undefined_reason.empty());
}

TEST(Sobol, RejectsBadInputs)
{
    const std::vector<double> one{0.0}, two{0.0, 1.0};
    EXPECT_THROW(sobol_first_order({}, "placebo", one, 10, Mode::keyed, kStream), std::invalid_argument);
    EXPECT_THROW(sobol_first_order({}, "placebo", two, 1, Mode::keyed, kStream), std::invalid_argument);
    EXPECT_THROW(sobol_first_order({}, "colour", two, 10, Mode::keyed, kStream), std::invalid_argument);
    EXPECT_THROW(sobol_first_order({}, "ve", std::vector<double>{0.0, 2.0}, 10, Mode::keyed, kStream),
                 std::invalid_argument);
}

TEST(Audit, ToySeedShowsIndexShift)
{
    const WorldSeed seed{0, static_cast<std::uint64_t>(oracle()["toy_seed_lo"].get<int>())};
    const RunOutcome a = traced(toy(), Mode::stateful, Scenario::baseline, seed);
    const RunOutcome b = traced(toy(), Mode::stateful, Scenario::intervention, seed);
    const AuditTable t = draw_index_audit(a, b);
    const AuditRow* row = t.find("infection(2)");
    ASSERT_TRUE(row);
    EXPECT_EQ(*row->index0, 3u);
    EXPECT_EQ(*row->index1, 2u);
    EXPECT_FALSE(row->noise_matches());
    EXPECT_GE(t.shifts.at(-1), 1u);
    for (const auto& e : t.mismatched_events())
        EXPECT_TRUE(e.ends_with("(2)")) << e;
    const AuditRow* inc = t.find("incubation(1)");
    ASSERT_TRUE(inc);
    EXPECT_FALSE(inc->shared());
}

TEST(Audit, KeyedSharedEventsAllMatch)
{
    for (std::uint64_t s = 0; s < 50; ++s) {
        const WorldSeed seed{s, 1};
        const AuditTable t = draw_index_audit(traced({}, Mode::keyed, Scenario::baseline, seed),
                                              traced({}, Mode::keyed, Scenario::intervention, seed));
        EXPECT_EQ(t.n_mismatched, 0u);
        EXPECT_GT(t.n_shared, 0u);
    }
}

TEST(Audit, IdenticalRunsAndSymmetry)
{
    const WorldSeed seed{7, 7};
    const RunOutcome a = traced({}, Mode::stateful, Scenario::baseline, seed);
    const RunOutcome b = traced({}, Mode::stateful, Scenario::intervention, seed);
    EXPECT_TRUE(draw_index_audit(a, a).mismatched_events().empty());
    EXPECT_EQ(draw_index_audit(a, b).mismatched_events(), draw_index_audit(b, a).mismatched_events());
    EXPECT_EQ(draw_index_audit(a, b).n_mismatched, draw_index_audit(b, a).n_mismatched);
}

TEST(Audit, RequiresTraces)
{
    const RunOutcome plain = simulate(InfectionModelParams{}, Mode::keyed, Scenario::baseline, WorldSeed{1, 1});
    const RunOutcome withTrace = traced({}, Mode::keyed, Scenario::baseline, WorldSeed{1, 1});
    EXPECT_THROW(draw_index_audit(plain, withTrace), std::invalid_argument);
}
