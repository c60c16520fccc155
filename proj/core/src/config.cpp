#include "evrng/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace evrng {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw ConfigError("config field '" + path + "': " + msg);
}

std::string child(const std::string& path, std::string_view key)
{
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed)
{
    if (!j.is_object())
        fail(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(child(path, key), "unknown field");
    }
}

double read_number(const json& v, const std::string& path)
{
    if (!v.is_number())
        fail(path, "expected a number");
    return v.get<double>();
}

std::uint64_t read_count(const json& v, const std::string& path)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

bool read_bool(const json& v, const std::string& path)
{
    if (!v.is_boolean())
        fail(path, "expected true or false");
    return v.get<bool>();
}

std::string read_string(const json& v, const std::string& path)
{
    if (!v.is_string())
        fail(path, "expected a string");
    return v.get<std::string>();
}

template <class Parse>
auto read_enum(const json& v, const std::string& path, Parse parse)
{
    const std::string s = read_string(v, path);
    try {
        return parse(s);
    }
    catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

WorldSeed read_seed(const json& v, const std::string& path)
{
    const std::string s = read_string(v, path);
    try {
        return WorldSeed::from_hex(s);
    }
    catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

json infection_to_json(const InfectionModelParams& p)
{
    json j;
    j["n_agents"] = p.n_agents;
    const bool uniform = !p.p_infect.empty() && std::all_of(p.p_infect.begin(), p.p_infect.end(),
                                                            [&](double x) { return x == p.p_infect.front(); });
    if (uniform)
        j["p_infect"] = p.p_infect.front();
    else
        j["p_infect"] = p.p_infect;
    j["vaccine_efficacy"] = p.vaccine_efficacy;
    j["vaccinated_agents"] = p.vaccinated_agents;
    j["placebo"] = p.placebo;
    j["incubation_rate"] = p.incubation_rate;
    return j;
}

InfectionModelParams infection_from_json(const json& j, const std::string& path)
{
    check_keys(j, path,
               {"n_agents", "p_infect", "vaccine_efficacy", "vaccinated_agents", "placebo", "incubation_rate"});
    InfectionModelParams p;
    if (j.contains("n_agents"))
        p.n_agents = read_count(j["n_agents"], child(path, "n_agents"));
    p.p_infect.assign(p.n_agents, 0.3);
    if (j.contains("p_infect")) {
        const auto& v = j["p_infect"];
        const std::string pp = child(path, "p_infect");
        if (v.is_array()) {
            p.p_infect.clear();
            for (std::size_t i = 0; i < v.size(); ++i)
                p.p_infect.push_back(read_number(v[i], pp + "[" + std::to_string(i) + "]"));
            if (p.p_infect.size() != p.n_agents)
                fail(pp, "has " + std::to_string(p.p_infect.size()) + " entries but n_agents is " +
                             std::to_string(p.n_agents));
        }
        else {
            p.p_infect.assign(p.n_agents, read_number(v, pp));
        }
    }
    if (j.contains("vaccine_efficacy"))
        p.vaccine_efficacy = read_number(j["vaccine_efficacy"], child(path, "vaccine_efficacy"));
    if (j.contains("vaccinated_agents")) {
        const auto& v = j["vaccinated_agents"];
        const std::string vp = child(path, "vaccinated_agents");
        if (!v.is_array())
            fail(vp, "expected an array of agent indices");
        p.vaccinated_agents.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
            p.vaccinated_agents.push_back(read_count(v[i], vp + "[" + std::to_string(i) + "]"));
    }
    if (j.contains("placebo"))
        p.placebo = read_bool(j["placebo"], child(path, "placebo"));
    if (j.contains("incubation_rate"))
        p.incubation_rate = read_number(j["incubation_rate"], child(path, "incubation_rate"));
    try {
        p.validate();
    }
    catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return p;
}

json clinic_to_json(const ClinicModelParams& c)
{
    json j;
    j["n_patients"] = c.n_patients;
    j["n_workers"] = c.n_workers;
    j["keying"] = std::string(to_string(c.keying));
    j["worker_swap"] = c.worker_swap;
    json enc = json::array();
    for (const auto& e : c.encounters)
        enc.push_back(json::array({e.day, e.patient, e.slot, e.worker, e.alt_worker, e.risk}));
    j["encounters"] = std::move(enc);
    return j;
}

ClinicModelParams clinic_from_json(const json& j, const std::string& path)
{
    check_keys(j, path, {"n_patients", "n_workers", "keying", "worker_swap", "encounters", "layout"});
    if (j.contains("encounters") && j.contains("layout"))
        fail(path, "give either encounters or layout, not both");

    std::size_t n_patients = 20, n_workers = 6;
    if (j.contains("n_patients"))
        n_patients = read_count(j["n_patients"], child(path, "n_patients"));
    if (j.contains("n_workers"))
        n_workers = read_count(j["n_workers"], child(path, "n_workers"));

    ClinicModelParams c;
    if (j.contains("encounters")) {
        const auto& v = j["encounters"];
        const std::string ep = child(path, "encounters");
        if (!v.is_array())
            fail(ep, "expected an array of [day, patient, slot, worker, alt_worker, risk]");
        c.n_patients = n_patients;
        c.n_workers = n_workers;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const std::string rp = ep + "[" + std::to_string(k) + "]";
            const auto& row = v[k];
            if (!row.is_array() || row.size() != 6)
                fail(rp, "expected [day, patient, slot, worker, alt_worker, risk]");
            c.encounters.push_back({read_count(row[0], rp + "[0]"), read_count(row[1], rp + "[1]"),
                                    read_count(row[2], rp + "[2]"), read_count(row[3], rp + "[3]"),
                                    read_count(row[4], rp + "[4]"), read_number(row[5], rp + "[5]")});
        }
    }
    else {
        std::size_t days = 3, slots = 2;
        double risk = 0.15;
        if (j.contains("layout")) {
            const auto& l = j["layout"];
            const std::string lp = child(path, "layout");
            check_keys(l, lp, {"days", "slots_per_day", "risk"});
            if (l.contains("days"))
                days = read_count(l["days"], child(lp, "days"));
            if (l.contains("slots_per_day"))
                slots = read_count(l["slots_per_day"], child(lp, "slots_per_day"));
            if (l.contains("risk"))
                risk = read_number(l["risk"], child(lp, "risk"));
        }
        if (n_workers == 0)
            fail(child(path, "n_workers"), "must be positive");
        c = ClinicModelParams::make_default(n_patients, n_workers, days, slots, risk);
    }
    if (j.contains("keying"))
        c.keying = read_enum(j["keying"], child(path, "keying"), parse_keying);
    if (j.contains("worker_swap"))
        c.worker_swap = read_bool(j["worker_swap"], child(path, "worker_swap"));
    try {
        c.validate();
    }
    catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return c;
}

} // namespace

ModelSpec ExperimentConfig::model_spec() const
{
    if (model == "clinic")
        return clinic;
    return infection;
}

void ExperimentConfig::validate() const
{
    if (model != "infection" && model != "clinic")
        fail("model", "expected infection or clinic");
    if (m < 2)
        fail("m", "must be at least 2");
    if (sobol.grid.size() < 2)
        fail("sobol.grid", "needs at least 2 values");
    if (sobol.m_inner < 2)
        fail("sobol.m_inner", "must be at least 2");
    infection.validate();
    clinic.validate();
}

json to_json(const ExperimentConfig& c)
{
    json j;
    j["model"] = c.model;
    j["mode"] = std::string(to_string(c.mode));
    j["scenario"] = std::string(to_string(c.scenario));
    j["scenario_pair"] = json::array({std::string(to_string(c.scenario_pair.first)),
                                      std::string(to_string(c.scenario_pair.second))});
    j["seed_stream"] = c.seed_stream.to_hex();
    if (c.seed)
        j["seed"] = c.seed->to_hex();
    j["m"] = c.m;
    j["n_seeds"] = c.n_seeds;
    j["observable_agent"] = c.observable.agent ? json(*c.observable.agent) : json(nullptr);
    j["infection"] = infection_to_json(c.infection);
    j["clinic"] = clinic_to_json(c.clinic);
    j["sobol"] = {{"parameter", c.sobol.parameter}, {"grid", c.sobol.grid}, {"m_inner", c.sobol.m_inner}};
    j["strict_ledger"] = c.strict_ledger;
    j["trace"] = c.trace;
    j["csv"] = c.csv;
    return j;
}

ExperimentConfig config_from_json(const json& j)
{
    check_keys(j, "",
               {"model", "mode", "scenario", "scenario_pair", "seed_stream", "seed", "m", "n_seeds",
                "observable_agent", "infection", "clinic", "sobol", "strict_ledger", "trace", "csv"});
    ExperimentConfig c;
    if (j.contains("model")) {
        c.model = read_string(j["model"], "model");
        if (c.model != "infection" && c.model != "clinic")
            fail("model", "expected infection or clinic, got '" + c.model + "'");
    }
    if (j.contains("mode"))
        c.mode = read_enum(j["mode"], "mode", parse_mode);
    if (j.contains("scenario"))
        c.scenario = read_enum(j["scenario"], "scenario", parse_scenario);
    if (j.contains("scenario_pair")) {
        const auto& v = j["scenario_pair"];
        if (!v.is_array() || v.size() != 2)
            fail("scenario_pair", "expected two scenario names");
        c.scenario_pair.first = read_enum(v[0], "scenario_pair[0]", parse_scenario);
        c.scenario_pair.second = read_enum(v[1], "scenario_pair[1]", parse_scenario);
    }
    if (j.contains("seed_stream"))
        c.seed_stream = read_seed(j["seed_stream"], "seed_stream");
    if (j.contains("seed") && !j["seed"].is_null())
        c.seed = read_seed(j["seed"], "seed");
    if (j.contains("m")) {
        c.m = read_count(j["m"], "m");
        if (c.m < 2)
            fail("m", "must be at least 2");
    }
    if (j.contains("n_seeds"))
        c.n_seeds = read_count(j["n_seeds"], "n_seeds");
    if (j.contains("observable_agent") && !j["observable_agent"].is_null()) {
        c.observable.agent = read_count(j["observable_agent"], "observable_agent");
        if (*c.observable.agent == 0)
            fail("observable_agent", "agents are numbered from 1");
    }
    if (j.contains("infection"))
        c.infection = infection_from_json(j["infection"], "infection");
    if (j.contains("clinic"))
        c.clinic = clinic_from_json(j["clinic"], "clinic");
    if (j.contains("sobol")) {
        const auto& s = j["sobol"];
        check_keys(s, "sobol", {"parameter", "grid", "m_inner"});
        if (s.contains("parameter"))
            c.sobol.parameter = read_string(s["parameter"], "sobol.parameter");
        if (s.contains("grid")) {
            if (!s["grid"].is_array())
                fail("sobol.grid", "expected an array of numbers");
            c.sobol.grid.clear();
            for (std::size_t i = 0; i < s["grid"].size(); ++i)
                c.sobol.grid.push_back(read_number(s["grid"][i], "sobol.grid[" + std::to_string(i) + "]"));
        }
        if (s.contains("m_inner"))
            c.sobol.m_inner = read_count(s["m_inner"], "sobol.m_inner");
        static constexpr std::string_view known[] = {"ve", "placebo", "p_infect", "incubation_rate"};
        if (std::find(std::begin(known), std::end(known), c.sobol.parameter) == std::end(known))
            fail("sobol.parameter", "expected ve, placebo, p_infect or incubation_rate");
        if (c.sobol.grid.size() < 2)
            fail("sobol.grid", "needs at least 2 values");
        if (c.sobol.m_inner < 2)
            fail("sobol.m_inner", "must be at least 2");
    }
    if (j.contains("strict_ledger"))
        c.strict_ledger = read_bool(j["strict_ledger"], "strict_ledger");
    if (j.contains("trace"))
        c.trace = read_bool(j["trace"], "trace");
    if (j.contains("csv"))
        c.csv = read_bool(j["csv"], "csv");
    return c;
}

ExperimentConfig parse_config(std::string_view text, std::string_view source)
{
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t k = 0; k < end; ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            }
            else {
                ++col;
            }
        }
        std::string what = e.what();
        if (auto pos = what.find("syntax error"); pos != std::string::npos)
            what = what.substr(pos);
        throw ConfigError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
    return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string config_digest(const ExperimentConfig& c)
{
    json j = to_json(c);
    j.erase("scenario");
    return digest_hex(j.dump());
}

} // namespace evrng
