#include "evrng/serialize.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace evrng {

using nlohmann::json;

std::string format_double(double x)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc())
        throw std::runtime_error("format_double failed");
    return {buf, end};
}

json provenance(const ExperimentConfig& config)
{
    return {
        {"generators", {{"keyed", std::string(kGeneratorId)}, {"stateful", std::string(kStatefulGeneratorId)}}},
        {"mode", std::string(to_string(config.mode))},
        {"seed_stream", config.seed_stream.to_hex()},
        {"config_digest", config_digest(config)},
        {"config", to_json(config)},
    };
}

json to_json(const RunOutcome& run, bool include_trace)
{
    json j;
    j["model"] = run.model;
    j["mode"] = std::string(to_string(run.mode));
    j["scenario"] = std::string(to_string(run.scenario));
    j["seed"] = run.seed.to_hex();
    j["cases"] = run.cases;
    json infected = json::array();
    for (bool b : run.infected)
        infected.push_back(b ? 1 : 0);
    j["infected"] = std::move(infected);
    json onset = json::array();
    for (const auto& d : run.onset_day)
        onset.push_back(d ? json(*d) : json(nullptr));
    j["onset_day"] = std::move(onset);

    json trials = json::array();
    for (const auto& t : run.trials)
        trials.push_back({{"event", t.event}, {"agent", t.agent}, {"p", t.p}, {"u", t.u}, {"y", t.y ? 1 : 0}});
    j["trials"] = std::move(trials);

    json noise = json::array();
    for (const auto& [event, entry] : run.noise_map)
        noise.push_back({{"event", event}, {"u", entry.u}, {"position", entry.position}});
    j["noise_map"] = std::move(noise);

    if (include_trace && run.has_trace) {
        json trace = json::array();
        for (const auto& d : run.draw_trace)
            trace.push_back({{"event", d.event}, {"index", d.index}, {"u", d.u}});
        j["draw_trace"] = std::move(trace);
    }
    return j;
}

RunOutcome run_outcome_from_json(const json& j)
{
    try {
        RunOutcome run;
        run.model = j.at("model").get<std::string>();
        run.mode = parse_mode(j.at("mode").get<std::string>());
        run.scenario = parse_scenario(j.at("scenario").get<std::string>());
        run.seed = WorldSeed::from_hex(j.at("seed").get<std::string>());
        run.cases = j.at("cases").get<std::uint64_t>();
        for (const auto& v : j.at("infected"))
            run.infected.push_back(v.get<int>() != 0);
        for (const auto& v : j.at("onset_day"))
            run.onset_day.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
        for (const auto& t : j.at("trials"))
            run.trials.push_back({t.at("event").get<std::string>(), t.at("agent").get<std::size_t>(),
                                  t.at("p").get<double>(), t.at("u").get<double>(), t.at("y").get<int>() != 0});
        for (const auto& n : j.at("noise_map"))
            run.noise_map.emplace(n.at("event").get<std::string>(),
                                  NoiseEntry{n.at("u").get<double>(), n.at("position").get<std::uint64_t>()});
        if (j.contains("draw_trace")) {
            run.has_trace = true;
            for (const auto& d : j["draw_trace"])
                run.draw_trace.push_back(
                    {d.at("event").get<std::string>(), d.at("index").get<std::uint64_t>(), d.at("u").get<double>()});
        }
        return run;
    }
    catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed run outcome: ") + e.what());
    }
}

json to_json(const AteReport& r)
{
    return {{"m", r.m},
            {"delta_hat", r.delta_hat},
            {"var_y0", r.var_y0},
            {"var_y1", r.var_y1},
            {"cov", r.cov},
            {"var_delta_hat", r.var_delta_hat},
            {"var_ite", r.var_ite},
            {"cov_se", r.cov_se}};
}

json to_json(const StrataCensus& c)
{
    json counts;
    for (auto s : {StratumLabel::always_infected, StratumLabel::preventable, StratumLabel::never_infected})
        counts[std::string(to_string(s))] = c.counts[static_cast<std::size_t>(s)];
    return {{"counts", counts},
            {"observed", {{"y0=0,y1=0", c.observed[0][0]},
                          {"y0=0,y1=1", c.observed[0][1]},
                          {"y0=1,y1=0", c.observed[1][0]},
                          {"y0=1,y1=1", c.observed[1][1]}}},
            {"shared_events", c.shared_events},
            {"prediction_mismatches", c.prediction_mismatches},
            {"noise_mismatches", c.noise_mismatches},
            {"unmatched_events", c.unmatched_events}};
}

json to_json(const PlaceboReport& r)
{
    json seeds = json::array();
    for (const auto& d : r.seeds) {
        if (!d.outcome_divergent && !d.first_mismatch)
            continue;
        json s{{"index", d.index}, {"seed", d.seed.to_hex()}, {"outcome_divergent", d.outcome_divergent}};
        if (d.first_mismatch) {
            const auto& f = *d.first_mismatch;
            s["first_mismatch"] = {{"event", f.event},
                                   {"u_baseline", f.u_baseline},
                                   {"u_placebo", f.u_placebo},
                                   {"position_baseline", f.position_baseline},
                                   {"position_placebo", f.position_placebo}};
        }
        seeds.push_back(std::move(s));
    }
    return {{"mode", std::string(to_string(r.mode))},
            {"n_seeds", r.n_seeds},
            {"n_divergent", r.n_divergent},
            {"n_latent_divergent", r.n_latent_divergent},
            {"divergent_seeds", std::move(seeds)}};
}

json to_json(const VarianceComparison& v)
{
    return {{"m", v.m},
            {"arms", {{"independent", to_json(v.independent)},
                      {"crn_stateful", to_json(v.crn_stateful)},
                      {"crn_keyed", to_json(v.crn_keyed)}}},
            {"ordering", {{"keyed_le_independent", v.keyed_le_independent},
                          {"keyed_le_stateful", v.keyed_le_stateful},
                          {"stateful_le_independent", v.stateful_le_independent}}},
            {"cov_sign", {{"independent", v.independent.cov > 0 ? 1 : v.independent.cov < 0 ? -1 : 0},
                          {"crn_stateful", v.crn_stateful.cov > 0 ? 1 : v.crn_stateful.cov < 0 ? -1 : 0},
                          {"crn_keyed", v.crn_keyed.cov > 0 ? 1 : v.crn_keyed.cov < 0 ? -1 : 0}}}};
}

json to_json(const SobolReport& r)
{
    json j{{"parameter", r.parameter},
           {"mode", std::string(to_string(r.mode))},
           {"m_inner", r.m_inner},
           {"grid", r.grid},
           {"conditional_means", r.conditional_means},
           {"v_i", r.v_i},
           {"total_variance", r.total_variance}};
    if (r.s_i)
        j["s_i"] = *r.s_i;
    else
        j["s_i"] = {{"undefined", r.undefined_reason}};
    return j;
}

json to_json(const AuditTable& t)
{
    auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"event", r.event},
                        {"index0", opt(r.index0)},
                        {"index1", opt(r.index1)},
                        {"u0", opt(r.u0)},
                        {"u1", opt(r.u1)},
                        {"match", r.noise_matches()}});
    json shifts = json::array();
    for (const auto& [shift, count] : t.shifts)
        shifts.push_back({{"shift", shift}, {"count", count}});
    return {{"rows", std::move(rows)},
            {"n_shared", t.n_shared},
            {"n_mismatched", t.n_mismatched},
            {"mismatched_events", t.mismatched_events()},
            {"index_shifts", std::move(shifts)}};
}

namespace {

void ate_fields(std::ostringstream& out, const AteReport& r)
{
    out << r.m << ',' << format_double(r.delta_hat) << ',' << format_double(r.var_y0) << ','
        << format_double(r.var_y1) << ',' << format_double(r.cov) << ',' << format_double(r.var_delta_hat) << ','
        << format_double(r.var_ite) << ',' << format_double(r.cov_se) << '\n';
}

} // namespace

std::string replicates_csv(std::span<const PairedReplicate> reps)
{
    std::ostringstream out;
    out << "index,seed,y0,y1,ite\n";
    for (const auto& r : reps)
        out << r.index << ',' << r.seed.to_hex() << ',' << format_double(r.y0) << ',' << format_double(r.y1) << ','
            << format_double(r.ite) << '\n';
    return out.str();
}

std::string ate_csv(const AteReport& r)
{
    std::ostringstream out;
    out << "m,delta_hat,var_y0,var_y1,cov,var_delta_hat,var_ite,cov_se\n";
    ate_fields(out, r);
    return out.str();
}

std::string variance_csv(const VarianceComparison& v)
{
    std::ostringstream out;
    out << "arm,m,delta_hat,var_y0,var_y1,cov,var_delta_hat,var_ite,cov_se\n";
    out << "independent,";
    ate_fields(out, v.independent);
    out << "crn_stateful,";
    ate_fields(out, v.crn_stateful);
    out << "crn_keyed,";
    ate_fields(out, v.crn_keyed);
    return out.str();
}

std::string strata_csv(const StrataCensus& c)
{
    std::ostringstream out;
    out << "stratum,count\n";
    for (auto s : {StratumLabel::always_infected, StratumLabel::preventable, StratumLabel::never_infected})
        out << to_string(s) << ',' << c.counts[static_cast<std::size_t>(s)] << '\n';
    return out.str();
}

std::string placebo_csv(const PlaceboReport& r)
{
    std::ostringstream out;
    out << "index,seed,outcome_divergent,first_event,u_baseline,u_placebo,position_baseline,position_placebo\n";
    for (const auto& d : r.seeds) {
        out << d.index << ',' << d.seed.to_hex() << ',' << (d.outcome_divergent ? 1 : 0) << ',';
        if (d.first_mismatch) {
            const auto& f = *d.first_mismatch;
            out << '"' << f.event << "\"," << format_double(f.u_baseline) << ',' << format_double(f.u_placebo) << ','
                << f.position_baseline << ',' << f.position_placebo;
        }
        else {
            out << ",,,,";
        }
        out << '\n';
    }
    return out.str();
}

std::string sobol_csv(const SobolReport& r)
{
    std::ostringstream out;
    out << "value,conditional_mean\n";
    for (std::size_t k = 0; k < r.grid.size(); ++k)
        out << format_double(r.grid[k]) << ',' << format_double(r.conditional_means[k]) << '\n';
    return out.str();
}

std::string audit_csv(const AuditTable& t)
{
    std::ostringstream out;
    out << "event,index0,index1,u0,u1,match\n";
    for (const auto& r : t.rows) {
        out << '"' << r.event << "\",";
        if (r.index0)
            out << *r.index0;
        out << ',';
        if (r.index1)
            out << *r.index1;
        out << ',';
        if (r.u0)
            out << format_double(*r.u0);
        out << ',';
        if (r.u1)
            out << format_double(*r.u1);
        out << ',' << (r.noise_matches() ? 1 : 0) << '\n';
    }
    return out.str();
}

} // namespace evrng
