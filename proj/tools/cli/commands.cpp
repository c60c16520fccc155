#include "commands.hpp"

#include "evrng/analysis.hpp"
#include "evrng/config.hpp"
#include "evrng/serialize.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace evrng::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Artifacts {
    std::vector<std::pair<std::string, std::string>> files;
    bool assertions_passed = true;

    void add_json(const std::string& name, const json& j) { files.emplace_back(name, j.dump(2) + "\n"); }
    void add_text(const std::string& name, std::string text) { files.emplace_back(name, std::move(text)); }
};

struct Context {
    ExperimentConfig config;
    const CliOptions& options;
    std::ostream& out;
    Artifacts artifacts;

    json envelope(const std::string& kind) const { return {{"kind", kind}, {"provenance", provenance(config)}}; }

    void check(json& report, const std::string& name, bool passed)
    {
        report["assertions"].push_back({{"name", name}, {"passed", passed}});
        if (!passed)
            artifacts.assertions_passed = false;
    }
};

void write_all(const fs::path& dir, const Artifacts& a)
{
    fs::create_directories(dir);
    for (const auto& [name, content] : a.files) {
        const fs::path target = dir / name;
        const fs::path tmp = dir / (name + ".tmp");
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f)
                throw std::runtime_error("cannot write " + tmp.string());
            f << content;
            if (!f)
                throw std::runtime_error("write failed for " + tmp.string());
        }
        fs::rename(tmp, target);
    }
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    }
    catch (const json::parse_error& e) {
        throw std::runtime_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

RunOptions run_options(const ExperimentConfig& c, EventLedger* ledger)
{
    RunOptions o;
    o.trace = c.trace;
    o.ledger = c.mode == Mode::keyed && c.strict_ledger ? ledger : nullptr;
    return o;
}

void cmd_run(Context& ctx)
{
    const auto& c = ctx.config;
    EventLedger ledger(true);
    const RunOutcome run = simulate(c.model_spec(), c.mode, c.scenario, c.run_seed(), run_options(c, &ledger));
    json j = ctx.envelope("run");
    j["outcome"] = to_json(run, c.trace);
    ctx.artifacts.add_json("run.json", j);
    ctx.out << "cases=" << run.cases << " seed=" << run.seed.to_hex() << " mode=" << to_string(run.mode) << "\n";
}

PairedOptions paired_options(const Context& ctx)
{
    PairedOptions opts;
    opts.run.trace = ctx.config.trace;
    opts.observable = ctx.config.observable;
    opts.threads = ctx.options.threads;
    opts.strict_ledger = ctx.config.strict_ledger;
    return opts;
}

void cmd_paired(Context& ctx)
{
    const auto& c = ctx.config;
    PairedOptions opts = paired_options(ctx);
    opts.run.record_noise = false;
    const auto reps = run_paired(c.m, c.model_spec(), c.scenario_pair, c.mode, c.seed_stream, opts);
    const AteReport ate = estimate_ate(reps);

    json j = ctx.envelope("paired");
    j["scenario_pair"] = {std::string(to_string(c.scenario_pair.first)), std::string(to_string(c.scenario_pair.second))};
    j["ate"] = to_json(ate);
    j["assertions"] = json::array();
    const double direct = ate.var_ite / static_cast<double>(ate.m);
    ctx.check(j, "var_delta_hat equals var(ite)/m",
              std::abs(ate.var_delta_hat - direct) <= 1e-9 * std::max(std::abs(direct), 1e-300) ||
                  ate.var_delta_hat == direct);
    ctx.artifacts.add_json("paired.json", j);
    if (c.csv) {
        ctx.artifacts.add_text("paired_ate.csv", ate_csv(ate));
        ctx.artifacts.add_text("paired_replicates.csv", replicates_csv(reps));
    }
    ctx.out << "m=" << ate.m << " delta_hat=" << format_double(ate.delta_hat)
            << " var_delta_hat=" << format_double(ate.var_delta_hat) << " cov=" << format_double(ate.cov)
            << " mode=" << to_string(c.mode) << "\n";
}

void cmd_placebo(Context& ctx)
{
    const auto& c = ctx.config;
    if (c.model != "infection")
        throw std::invalid_argument("placebo experiment needs model = infection");
    const PlaceboReport r = placebo_experiment(c.n_seeds, c.infection, c.mode, c.seed_stream, ctx.options.threads);
    json j = ctx.envelope("placebo");
    j["report"] = to_json(r);
    j["assertions"] = json::array();
    if (c.mode == Mode::keyed) {
        ctx.check(j, "no divergent runs", r.n_divergent == 0);
        ctx.check(j, "no latent divergence", r.n_latent_divergent == 0);
    }
    ctx.artifacts.add_json("placebo.json", j);
    if (c.csv)
        ctx.artifacts.add_text("placebo.csv", placebo_csv(r));
    ctx.out << "n_seeds=" << r.n_seeds << " n_divergent=" << r.n_divergent
            << " n_latent_divergent=" << r.n_latent_divergent << " mode=" << to_string(r.mode) << "\n";
}

void cmd_variance(Context& ctx)
{
    const auto& c = ctx.config;
    const VarianceComparison v =
        variance_comparison(c.m, c.model_spec(), c.scenario_pair, c.seed_stream, ctx.options.threads);
    json j = ctx.envelope("variance");
    j["report"] = to_json(v);
    j["assertions"] = json::array();
    for (const auto& [name, r] : {std::pair{"independent", &v.independent}, std::pair{"crn_stateful", &v.crn_stateful},
                                  std::pair{"crn_keyed", &v.crn_keyed}}) {
        const double direct = r->var_ite / static_cast<double>(r->m);
        ctx.check(j, std::string(name) + ": var_delta_hat equals var(ite)/m",
                  std::abs(r->var_delta_hat - direct) <= 1e-9 * std::abs(direct) || r->var_delta_hat == direct);
    }
    ctx.artifacts.add_json("variance.json", j);
    if (c.csv)
        ctx.artifacts.add_text("variance.csv", variance_csv(v));
    ctx.out << "m=" << v.m << " var_delta_hat independent=" << format_double(v.independent.var_delta_hat)
            << " crn_stateful=" << format_double(v.crn_stateful.var_delta_hat)
            << " crn_keyed=" << format_double(v.crn_keyed.var_delta_hat) << "\n";
}

void cmd_sobol(Context& ctx)
{
    const auto& c = ctx.config;
    if (c.model != "infection")
        throw std::invalid_argument("Sobol experiment needs model = infection");
    const SobolReport r = sobol_first_order(c.infection, c.sobol.parameter, c.sobol.grid, c.sobol.m_inner, c.mode,
                                            c.seed_stream, ctx.options.threads);
    json j = ctx.envelope("sobol");
    j["report"] = to_json(r);
    j["assertions"] = json::array();
    if (c.mode == Mode::keyed && c.sobol.parameter == "placebo")
        ctx.check(j, "null parameter has V_i = 0", r.v_i == 0.0);
    ctx.artifacts.add_json("sobol.json", j);
    if (c.csv)
        ctx.artifacts.add_text("sobol.csv", sobol_csv(r));
    ctx.out << "parameter=" << r.parameter << " v_i=" << format_double(r.v_i)
            << " total_variance=" << format_double(r.total_variance)
            << " s_i=" << (r.s_i ? format_double(*r.s_i) : "undefined") << " mode=" << to_string(r.mode) << "\n";
}

void cmd_strata(Context& ctx)
{
    const auto& c = ctx.config;
    if (c.mode == Mode::stateful)
        throw StrataUnidentifiable();
    const auto reps = run_paired(c.m, c.model_spec(), c.scenario_pair, c.mode, c.seed_stream, paired_options(ctx));
    const StrataCensus census = strata_census(reps);
    json j = ctx.envelope("strata");
    j["census"] = to_json(census);
    j["assertions"] = json::array();
    ctx.check(j, "predicted strata match observed outcomes", census.prediction_mismatches == 0);
    ctx.check(j, "shared events carry equal noise", census.noise_mismatches == 0);
    ctx.artifacts.add_json("strata.json", j);
    if (c.csv)
        ctx.artifacts.add_text("strata.csv", strata_csv(census));
    ctx.out << "always_infected=" << census.counts[0] << " preventable=" << census.counts[1]
            << " never_infected=" << census.counts[2] << " mismatches=" << census.prediction_mismatches << "\n";
}

void emit_audit(Context& ctx, json j, const AuditTable& t)
{
    j["audit"] = to_json(t);
    ctx.artifacts.add_json("audit.json", j);
    if (ctx.config.csv)
        ctx.artifacts.add_text("audit.csv", audit_csv(t));
    ctx.out << "shared=" << t.n_shared << " mismatched=" << t.n_mismatched << "\n";
}

void cmd_audit(Context& ctx)
{
    const auto& c = ctx.config;
    EventLedger la(true), lb(true);
    RunOptions oa = run_options(c, &la), ob = run_options(c, &lb);
    oa.trace = ob.trace = true;
    const ModelSpec spec = c.model_spec();
    const RunOutcome a = simulate(spec, c.mode, c.scenario_pair.first, c.run_seed(), oa);
    const RunOutcome b = simulate(spec, c.mode, c.scenario_pair.second, c.run_seed(), ob);
    emit_audit(ctx, ctx.envelope("audit"), draw_index_audit(a, b));
}

int audit_inputs(const CliOptions& options, std::ostream& out, std::ostream& err)
{
    if (options.inputs.size() != 2) {
        err << "error: audit --inputs takes exactly two run files\n";
        return kExitError;
    }
    const json a = read_json_file(options.inputs[0]);
    const json b = read_json_file(options.inputs[1]);
    const auto digest = [](const json& j, const std::string& path) {
        try {
            return j.at("provenance").at("config_digest").get<std::string>();
        }
        catch (const json::exception&) {
            throw std::runtime_error("'" + path + "' carries no config digest");
        }
    };
    const std::string da = digest(a, options.inputs[0]);
    const std::string db = digest(b, options.inputs[1]);
    if (da != db) {
        err << "error: config digests differ (" << da << " vs " << db << "); refusing to audit runs of different experiments\n";
        return kExitError;
    }
    ExperimentConfig config = config_from_json(a.at("provenance").at("config"));
    Context ctx{config, options, out, {}};
    json j{{"kind", "audit"}, {"provenance", a.at("provenance")}, {"inputs", options.inputs}};
    emit_audit(ctx, std::move(j), draw_index_audit(run_outcome_from_json(a.at("outcome")),
                                                   run_outcome_from_json(b.at("outcome"))));
    write_all(options.out_dir, ctx.artifacts);
    return kExitOk;
}

const std::map<std::string, std::function<void(Context&)>, std::less<>>& commands()
{
    static const std::map<std::string, std::function<void(Context&)>, std::less<>> table{
        {"run", cmd_run},         {"paired", cmd_paired}, {"placebo", cmd_placebo}, {"variance", cmd_variance},
        {"sobol", cmd_sobol},     {"audit", cmd_audit},   {"strata", cmd_strata},
    };
    return table;
}

} // namespace

int run_command(std::string_view name, const CliOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        auto it = commands().find(name);
        if (it == commands().end()) {
            err << "error: unknown command '" << name << "'\n";
            return kExitError;
        }
        if (name == "audit" && !options.inputs.empty())
            return audit_inputs(options, out, err);
        if (options.config_path.empty()) {
            err << "error: --config is required\n";
            return kExitError;
        }

        ExperimentConfig config = load_config(options.config_path);
        config.strict_ledger = config.strict_ledger || options.strict_ledger;
        config.trace = config.trace || options.trace;

        Context ctx{config, options, out, {}};
        it->second(ctx);
        write_all(options.out_dir, ctx.artifacts);
        if (!ctx.artifacts.assertions_passed) {
            err << "error: in-experiment assertions failed (see report)\n";
            return kExitAssertion;
        }
        return kExitOk;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

} // namespace evrng::cli
