#include "evrng/analysis.hpp"

#include "evrng/parallel.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace evrng {

std::optional<NoiseMismatch> first_noise_mismatch(const RunOutcome& baseline, const RunOutcome& other)
{
    std::vector<std::pair<const std::string*, const NoiseEntry*>> order;
    order.reserve(baseline.noise_map.size());
    for (const auto& [name, entry] : baseline.noise_map)
        order.emplace_back(&name, &entry);
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.second->position < b.second->position; });

    for (const auto& [name, entry] : order) {
        auto it = other.noise_map.find(*name);
        if (it == other.noise_map.end() || it->second.u == entry->u)
            continue;
        return NoiseMismatch{*name, entry->u, it->second.u, entry->position, it->second.position};
    }
    return std::nullopt;
}

PlaceboReport placebo_experiment(std::size_t n_seeds, const InfectionModelParams& params, Mode mode,
                                 const WorldSeed& seed_stream, unsigned threads)
{
    params.validate();
    InfectionModelParams placebo = params;
    placebo.placebo = true;

    PlaceboReport report;
    report.mode = mode;
    report.n_seeds = n_seeds;
    report.seeds.resize(n_seeds);
    parallel_for(n_seeds, threads, [&](std::size_t s) {
        SeedDivergence& d = report.seeds[s];
        d.index = s;
        d.seed = derive_seed(seed_stream, "placebo", s);
        const RunOutcome base = simulate(params, mode, Scenario::baseline, d.seed);
        const RunOutcome plac = simulate(placebo, mode, Scenario::intervention, d.seed);
        d.outcome_divergent = !base.same_outcome(plac);
        d.first_mismatch = first_noise_mismatch(base, plac);
    });

    for (const auto& d : report.seeds) {
        if (d.outcome_divergent)
            ++report.n_divergent;
        else if (d.first_mismatch)
            ++report.n_latent_divergent;
    }
    return report;
}

VarianceComparison variance_comparison(std::size_t m, const ModelSpec& spec, ScenarioPair pair,
                                       const WorldSeed& seed_stream, unsigned threads)
{
    if (m < 100)
        throw std::invalid_argument("variance_comparison needs m >= 100");

    PairedOptions opts;
    opts.run.record_noise = false;
    opts.threads = threads;

    VarianceComparison out;
    out.m = m;
    out.crn_stateful = estimate_ate(run_paired(m, spec, pair, Mode::stateful, seed_stream, opts));
    out.crn_keyed = estimate_ate(run_paired(m, spec, pair, Mode::keyed, seed_stream, opts));

    opts.seed_label = "independent.0";
    opts.second_seed_label = "independent.1";
    out.independent = estimate_ate(run_paired(m, spec, pair, Mode::keyed, seed_stream, opts));

    out.keyed_le_independent = out.crn_keyed.var_delta_hat <= out.independent.var_delta_hat;
    out.keyed_le_stateful = out.crn_keyed.var_delta_hat <= out.crn_stateful.var_delta_hat;
    out.stateful_le_independent = out.crn_stateful.var_delta_hat <= out.independent.var_delta_hat;
    return out;
}

namespace {

struct SobolPoint {
    InfectionModelParams params;
    Scenario scenario = Scenario::intervention;
};

SobolPoint sobol_point(const InfectionModelParams& base, std::string_view parameter, double value)
{
    SobolPoint pt{base, Scenario::intervention};
    if (parameter == "ve") {
        pt.params.vaccine_efficacy = value;
    }
    else if (parameter == "placebo") {
        if (value == 0.0)
            pt.scenario = Scenario::baseline;
        else
            pt.params.placebo = true;
    }
    else if (parameter == "p_infect") {
        std::fill(pt.params.p_infect.begin(), pt.params.p_infect.end(), value);
    }
    else if (parameter == "incubation_rate") {
        pt.params.incubation_rate = value;
    }
    else {
        throw std::invalid_argument("unknown Sobol parameter '" + std::string(parameter) +
                                    "' (expected ve, placebo, p_infect or incubation_rate)");
    }
    pt.params.validate();
    return pt;
}

double population_variance(std::span<const double> xs)
{
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(xs.size());
}

} // namespace

SobolReport sobol_first_order(const InfectionModelParams& base, std::string_view parameter,
                              std::span<const double> grid, std::size_t m_inner, Mode mode,
                              const WorldSeed& seed_stream, unsigned threads)
{
    if (grid.size() < 2)
        throw std::invalid_argument("Sobol grid needs at least 2 values");
    if (m_inner < 2)
        throw std::invalid_argument("Sobol m_inner must be at least 2");

    std::vector<SobolPoint> points;
    for (double v : grid)
        points.push_back(sobol_point(base, parameter, v));

    const std::size_t g = grid.size();
    std::vector<double> y(g * m_inner);
    RunOptions run;
    run.record_noise = false;
    parallel_for(m_inner, threads, [&](std::size_t w) {
        const WorldSeed seed = derive_seed(seed_stream, "sobol", w);
        for (std::size_t k = 0; k < g; ++k)
            y[k * m_inner + w] = static_cast<double>(simulate(points[k].params, mode, points[k].scenario, seed, run).cases);
    });

    SobolReport r;
    r.parameter = parameter;
    r.mode = mode;
    r.m_inner = m_inner;
    r.grid.assign(grid.begin(), grid.end());
    for (std::size_t k = 0; k < g; ++k) {
        double sum = 0.0;
        for (std::size_t w = 0; w < m_inner; ++w)
            sum += y[k * m_inner + w];
        r.conditional_means.push_back(sum / static_cast<double>(m_inner));
    }

    const bool all_equal = std::all_of(r.conditional_means.begin(), r.conditional_means.end(),
                                       [&](double c) { return c == r.conditional_means.front(); });
    r.v_i = all_equal ? 0.0 : population_variance(r.conditional_means);
    r.total_variance = population_variance(y);
    if (r.total_variance > 0.0)
        r.s_i = r.v_i / r.total_variance;
    else
        r.undefined_reason = "total variance is zero";
    return r;
}

std::vector<std::string> AuditTable::mismatched_events() const
{
    std::vector<std::string> out;
    for (const auto& row : rows) {
        if (row.shared() && !row.noise_matches())
            out.push_back(row.event);
    }
    std::sort(out.begin(), out.end());
    return out;
}

const AuditRow* AuditTable::find(std::string_view event) const
{
    for (const auto& row : rows) {
        if (row.event == event)
            return &row;
    }
    return nullptr;
}

AuditTable draw_index_audit(const RunOutcome& o0, const RunOutcome& o1)
{
    if (!o0.has_trace || !o1.has_trace)
        throw std::invalid_argument("draw-index audit needs both runs to carry draw traces (run with --trace)");

    std::unordered_map<std::string_view, const DrawRecord*> second;
    for (const auto& d : o1.draw_trace)
        second.emplace(d.event, &d);

    AuditTable table;
    std::unordered_map<std::string_view, bool> seen;
    for (const auto& d : o0.draw_trace) {
        AuditRow row{d.event, d.index, std::nullopt, d.u, std::nullopt};
        if (auto it = second.find(d.event); it != second.end()) {
            row.index1 = it->second->index;
            row.u1 = it->second->u;
            seen.emplace(d.event, true);
            ++table.n_shared;
            if (!row.noise_matches())
                ++table.n_mismatched;
            ++table.shifts[static_cast<std::int64_t>(*row.index1) - static_cast<std::int64_t>(*row.index0)];
        }
        table.rows.push_back(std::move(row));
    }
    for (const auto& d : o1.draw_trace) {
        if (!seen.count(d.event))
            table.rows.push_back({d.event, std::nullopt, d.index, std::nullopt, d.u});
    }
    return table;
}

} // namespace evrng
