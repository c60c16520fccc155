#include "evrng/counterfactual.hpp"

#include "evrng/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace evrng {

double Observable::operator()(const RunOutcome& run) const
{
    if (!agent)
        return static_cast<double>(run.cases);
    if (*agent < 1 || *agent > run.infected.size())
        throw std::out_of_range("observable agent " + std::to_string(*agent) + " not in run");
    return run.infected[*agent - 1] ? 1.0 : 0.0;
}

std::vector<PairedReplicate> run_paired(std::size_t m, const ModelSpec& spec, ScenarioPair pair, Mode mode,
                                        const WorldSeed& seed_stream, const PairedOptions& options)
{
    if (m < 2)
        throw std::invalid_argument("run_paired needs at least 2 replicates");

    std::vector<PairedReplicate> reps(m);
    parallel_for(m, options.threads, [&](std::size_t idx) {
        PairedReplicate& rep = reps[idx];
        rep.index = idx;
        rep.seed = derive_seed(seed_stream, options.seed_label, idx);
        const WorldSeed seed1 =
            options.second_seed_label ? derive_seed(seed_stream, *options.second_seed_label, idx) : rep.seed;
        try {
            // A fresh ledger per scenario run.
            EventLedger ledger0(options.strict_ledger);
            EventLedger ledger1(options.strict_ledger);
            RunOptions run0 = options.run;
            RunOptions run1 = options.run;
            if (mode == Mode::keyed && options.strict_ledger) {
                run0.ledger = &ledger0;
                run1.ledger = &ledger1;
            }
            rep.outcome0 = simulate(spec, mode, pair.first, rep.seed, run0);
            rep.outcome1 = simulate(spec, mode, pair.second, seed1, run1);
        }
        catch (const std::exception& e) {
            throw ReplicateError(idx, e.what());
        }
        rep.y0 = options.observable(rep.outcome0);
        rep.y1 = options.observable(rep.outcome1);
        rep.ite = rep.y1 - rep.y0;
    });
    return reps;
}

AteReport estimate_ate(std::span<const double> y0, std::span<const double> y1)
{
    if (y0.size() != y1.size())
        throw std::invalid_argument("estimate_ate: outcome vectors differ in length");
    const std::size_t m = y0.size();
    if (m < 2)
        throw std::invalid_argument("estimate_ate needs at least 2 replicates");

    const double dm = static_cast<double>(m);
    double s0 = 0.0, s1 = 0.0, sd = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        s0 += y0[k];
        s1 += y1[k];
        sd += y1[k] - y0[k];
    }
    const double mean0 = s0 / dm;
    const double mean1 = s1 / dm;
    const double mean_d = sd / dm;

    double ss0 = 0.0, ss1 = 0.0, sp = 0.0, ssd = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double d0 = y0[k] - mean0;
        const double d1 = y1[k] - mean1;
        const double dd = (y1[k] - y0[k]) - mean_d;
        ss0 += d0 * d0;
        ss1 += d1 * d1;
        sp += d0 * d1;
        ssd += dd * dd;
    }

    AteReport r;
    r.m = m;
    r.delta_hat = mean_d;
    r.var_y0 = ss0 / (dm - 1.0);
    r.var_y1 = ss1 / (dm - 1.0);
    r.cov = sp / (dm - 1.0);
    r.var_delta_hat = (r.var_y0 + r.var_y1 - 2.0 * r.cov) / dm;
    r.var_ite = ssd / (dm - 1.0);

    // Standard error of the covariance: spread of the centred products.
    const double mean_prod = sp / dm;
    double ssp = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double q = (y0[k] - mean0) * (y1[k] - mean1) - mean_prod;
        ssp += q * q;
    }
    r.cov_se = std::sqrt(ssp / (dm - 1.0) / dm);
    return r;
}

AteReport estimate_ate(std::span<const PairedReplicate> reps)
{
    std::vector<double> y0, y1;
    y0.reserve(reps.size());
    y1.reserve(reps.size());
    for (const auto& r : reps) {
        y0.push_back(r.y0);
        y1.push_back(r.y1);
    }
    return estimate_ate(y0, y1);
}

std::string_view to_string(StratumLabel s) noexcept
{
    switch (s) {
    case StratumLabel::always_infected:
        return "always_infected";
    case StratumLabel::preventable:
        return "preventable";
    case StratumLabel::never_infected:
        return "never_infected";
    }
    return "?";
}

StratumLabel classify_stratum(UnitUniform u, double p0, double p1)
{
    if (!(p0 >= 0.0 && p0 <= 1.0 && p1 >= 0.0 && p1 <= 1.0))
        throw std::invalid_argument("stratum probabilities must lie in [0, 1]");
    if (p1 > p0)
        throw std::invalid_argument("classify_stratum assumes a protective treatment (p1 <= p0)");
    if (u.value() < p1)
        return StratumLabel::always_infected;
    if (u.value() < p0)
        return StratumLabel::preventable;
    return StratumLabel::never_infected;
}

EventMatch match_events(const RunOutcome& o0, const RunOutcome& o1)
{
    std::unordered_map<std::string_view, const TrialRecord*> second;
    second.reserve(o1.trials.size());
    for (const auto& t : o1.trials)
        second.emplace(t.event, &t);

    EventMatch out;
    std::set<std::string_view> seen;
    for (const auto& t : o0.trials) {
        auto it = second.find(t.event);
        if (it == second.end()) {
            out.unmatched0.push_back(t);
            continue;
        }
        const TrialRecord& b = *it->second;
        seen.insert(b.event);
        out.matched.push_back({t.event, t.agent, t.p, b.p, t.u, b.u, t.y, b.y});
    }
    for (const auto& t : o1.trials) {
        if (!seen.count(t.event))
            out.unmatched1.push_back(t);
    }
    return out;
}

std::vector<std::optional<int>> individual_ite(const RunOutcome& o0, const RunOutcome& o1)
{
    if (o0.infected.size() != o1.infected.size())
        throw std::invalid_argument("individual_ite: runs have different populations");

    std::set<std::size_t> undefined;
    const EventMatch match = match_events(o0, o1);
    for (const auto* list : {&match.unmatched0, &match.unmatched1}) {
        for (const auto& t : *list)
            undefined.insert(t.agent);
    }

    std::vector<std::optional<int>> ite(o0.infected.size());
    for (std::size_t a = 1; a <= ite.size(); ++a) {
        if (!undefined.count(a))
            ite[a - 1] = int{o1.infected[a - 1]} - int{o0.infected[a - 1]};
    }
    return ite;
}

StrataCensus strata_census(std::span<const PairedReplicate> reps, const EventFilter& filter)
{
    StrataCensus census;
    for (const auto& rep : reps) {
        if (rep.outcome0.mode != Mode::keyed || rep.outcome1.mode != Mode::keyed)
            throw StrataUnidentifiable();
        if (rep.outcome0.noise_map.empty() || rep.outcome1.noise_map.empty())
            throw std::invalid_argument("strata census needs runs with recorded noise");

        const EventMatch match = match_events(rep.outcome0, rep.outcome1);
        for (const auto& t : match.matched) {
            if (filter && !filter(t.event))
                continue;
            ++census.shared_events;
            if (!t.same_noise())
                ++census.noise_mismatches;
            const StratumLabel s = classify_stratum(UnitUniform(t.u0), t.p0, t.p1);
            ++census.counts[static_cast<std::size_t>(s)];
            ++census.observed[t.y0][t.y1];
            const bool pred0 = s != StratumLabel::never_infected;
            const bool pred1 = s == StratumLabel::always_infected;
            if (pred0 != t.y0 || pred1 != t.y1)
                ++census.prediction_mismatches;
        }
        for (const auto* list : {&match.unmatched0, &match.unmatched1}) {
            for (const auto& t : *list) {
                if (!filter || filter(t.event))
                    ++census.unmatched_events;
            }
        }
    }
    return census;
}

std::uint64_t count_monotonicity_violations(std::span<const RunOutcome> ordered)
{
    std::uint64_t violations = 0;
    for (std::size_t k = 1; k < ordered.size(); ++k) {
        for (const auto& t : match_events(ordered[k - 1], ordered[k]).matched) {
            if (!t.y0 && t.y1)
                ++violations;
        }
    }
    return violations;
}

} // namespace evrng
