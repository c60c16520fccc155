#include "evrng/models.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

namespace evrng {

std::string_view to_string(Mode m) noexcept
{
    return m == Mode::stateful ? "stateful" : "keyed";
}

std::string_view to_string(Scenario s) noexcept
{
    return s == Scenario::baseline ? "baseline" : "intervention";
}

std::string_view to_string(KeyingMode k) noexcept
{
    return k == KeyingMode::slot ? "slot" : "dyad";
}

Mode parse_mode(std::string_view s)
{
    if (s == "stateful")
        return Mode::stateful;
    if (s == "keyed")
        return Mode::keyed;
    throw std::invalid_argument("unknown mode '" + std::string(s) + "' (expected stateful or keyed)");
}

Scenario parse_scenario(std::string_view s)
{
    if (s == "baseline")
        return Scenario::baseline;
    if (s == "intervention" || s == "swapped")
        return Scenario::intervention;
    throw std::invalid_argument("unknown scenario '" + std::string(s) + "' (expected baseline or intervention)");
}

KeyingMode parse_keying(std::string_view s)
{
    if (s == "slot")
        return KeyingMode::slot;
    if (s == "dyad")
        return KeyingMode::dyad;
    throw std::invalid_argument("unknown keying mode '" + std::string(s) + "' (expected slot or dyad)");
}

std::uint64_t StatefulGenerator::next_u64() noexcept
{
    ++draws_;
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

UnitUniform stateful_next(StatefulGenerator& gen) noexcept
{
    return gen.next();
}

namespace {

bool is_probability(double p)
{
    return p >= 0.0 && p <= 1.0;
}

} // namespace

void InfectionModelParams::validate() const
{
    if (n_agents == 0)
        throw std::invalid_argument("n_agents must be positive");
    if (p_infect.size() != n_agents)
        throw std::invalid_argument("p_infect has " + std::to_string(p_infect.size()) + " entries, expected " +
                                    std::to_string(n_agents));
    for (std::size_t i = 0; i < p_infect.size(); ++i) {
        if (!is_probability(p_infect[i]))
            throw std::invalid_argument("p_infect[" + std::to_string(i + 1) + "] outside [0, 1]");
    }
    if (!is_probability(vaccine_efficacy))
        throw std::invalid_argument("vaccine_efficacy outside [0, 1]");
    for (auto a : vaccinated_agents) {
        if (a < 1 || a > n_agents)
            throw std::invalid_argument("vaccinated agent " + std::to_string(a) + " outside 1.." +
                                        std::to_string(n_agents));
    }
    if (!(incubation_rate > 0.0))
        throw std::invalid_argument("incubation_rate must be positive");
}

void ClinicModelParams::validate() const
{
    if (n_patients == 0 || n_workers == 0)
        throw std::invalid_argument("clinic needs at least one patient and one worker");
    std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> slots;
    for (const auto& e : encounters) {
        if (e.patient < 1 || e.patient > n_patients)
            throw std::invalid_argument("encounter patient " + std::to_string(e.patient) + " out of range");
        if (e.worker < 1 || e.worker > n_workers || e.alt_worker < 1 || e.alt_worker > n_workers)
            throw std::invalid_argument("encounter worker out of range for patient " + std::to_string(e.patient));
        if (!is_probability(e.risk))
            throw std::invalid_argument("encounter risk outside [0, 1]");
        if (!slots.emplace(e.day, e.patient, e.slot).second)
            throw std::invalid_argument("duplicate slot " + std::to_string(e.slot) + " for patient " +
                                        std::to_string(e.patient) + " on day " + std::to_string(e.day));
    }
}

ClinicModelParams ClinicModelParams::make_default(std::size_t n_patients, std::size_t n_workers, std::size_t days,
                                                  std::size_t slots_per_day, double risk)
{
    ClinicModelParams c;
    c.n_patients = n_patients;
    c.n_workers = n_workers;
    for (std::uint64_t t = 0; t < days; ++t) {
        for (std::uint64_t i = 1; i <= n_patients; ++i) {
            for (std::uint64_t r = 1; r <= slots_per_day; ++r) {
                const std::uint64_t j = (i + r + t) % n_workers + 1;
                const std::uint64_t k = j % n_workers + 1;
                c.encounters.push_back({t, i, r, j, k, risk});
            }
        }
    }
    return c;
}

std::string_view model_name(const ModelSpec& spec) noexcept
{
    return std::holds_alternative<InfectionModelParams>(spec) ? "infection" : "clinic";
}

bool RunOutcome::same_outcome(const RunOutcome& other) const
{
    return cases == other.cases && infected == other.infected && onset_day == other.onset_day;
}

namespace {

// Hands out uniforms for named events and records where each one went.
// Stateful mode ignores the identity when choosing the value; keyed mode
// ignores the order.
class DrawContext {
public:
    DrawContext(const WorldSeed& seed, Mode mode, const RunOptions& options, RunOutcome& out)
        : seed_(seed)
        , mode_(mode)
        , options_(options)
        , out_(out)
        , gen_(seed)
    {
    }

    double draw(const EventId& e)
    {
        ++position_;
        const double u = mode_ == Mode::stateful ? gen_.next().value()
                                                 : event_uniform(seed_, e, options_.ledger).value();
        if (options_.record_noise || options_.trace) {
            auto name = e.to_string();
            if (options_.trace)
                out_.draw_trace.push_back({name, position_, u});
            if (options_.record_noise)
                out_.noise_map.insert_or_assign(std::move(name), NoiseEntry{u, position_});
        }
        return u;
    }

    bool trial(const EventId& e, std::size_t agent, double p)
    {
        const double u = draw(e);
        const bool y = sample_fixed(Bernoulli{p}, UnitUniform(u)) != 0.0;
        if (options_.record_noise)
            out_.trials.push_back({e.to_string(), agent, p, u, y});
        return y;
    }

private:
    WorldSeed seed_;
    Mode mode_;
    const RunOptions& options_;
    RunOutcome& out_;
    StatefulGenerator gen_;
    std::uint64_t position_ = 0;
};

RunOutcome start_outcome(std::string_view model, Mode mode, Scenario scenario, const WorldSeed& seed,
                         std::size_t n, const RunOptions& options)
{
    RunOutcome out;
    out.model = model;
    out.mode = mode;
    out.scenario = scenario;
    out.seed = seed;
    out.infected.assign(n, false);
    out.onset_day.assign(n, std::nullopt);
    out.has_trace = options.trace;
    return out;
}

RunOutcome simulate_infection(const WorldSeed& seed, const InfectionModelParams& params, Scenario scenario, Mode mode,
                              const RunOptions& options)
{
    params.validate();
    RunOutcome out = start_outcome("infection", mode, scenario, seed, params.n_agents, options);
    DrawContext ctx(seed, mode, options, out);
    const bool vaccinating = scenario == Scenario::intervention;
    const Exponential incubation{params.incubation_rate};

    for (std::size_t i = 1; i <= params.n_agents; ++i) {
        double p = params.p_infect[i - 1];
        const bool vaccinated = vaccinating && std::find(params.vaccinated_agents.begin(),
                                                         params.vaccinated_agents.end(),
                                                         i) != params.vaccinated_agents.end();
        if (vaccinated) {
            if (params.placebo)
                ctx.draw(EventId{"efficacy_check", {i}, 0});
            else
                p = p * (1.0 - params.vaccine_efficacy);
        }
        if (ctx.trial(EventId{"infection", {i}, 0}, i, p)) {
            ++out.cases;
            out.infected[i - 1] = true;
            // Only infected agents draw an incubation time.
            const double u = ctx.draw(EventId{"incubation", {i}, 0});
            out.onset_day[i - 1] = sample_fixed(incubation, UnitUniform(u));
        }
    }
    return out;
}

} // namespace

RunOutcome simulate_infection_stateful(const WorldSeed& seed, const InfectionModelParams& params, Scenario scenario,
                                       const RunOptions& options)
{
    return simulate_infection(seed, params, scenario, Mode::stateful, options);
}

RunOutcome simulate_infection_keyed(const WorldSeed& seed, const InfectionModelParams& params, Scenario scenario,
                                    const RunOptions& options)
{
    return simulate_infection(seed, params, scenario, Mode::keyed, options);
}

RunOutcome simulate_clinic(const WorldSeed& seed, const ClinicModelParams& params, Scenario scenario, Mode mode,
                           const RunOptions& options)
{
    params.validate();
    RunOutcome out = start_outcome("clinic", mode, scenario, seed, params.n_patients, options);
    DrawContext ctx(seed, mode, options, out);

    std::vector<const Encounter*> order;
    order.reserve(params.encounters.size());
    for (const auto& e : params.encounters)
        order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const Encounter* a, const Encounter* b) {
        return std::tie(a->day, a->patient, a->slot) < std::tie(b->day, b->patient, b->slot);
    });

    const bool swapped = scenario == Scenario::intervention && params.worker_swap;
    for (const Encounter* e : order) {
        const std::size_t i = e->patient;
        if (out.infected[i - 1])
            continue;
        const std::uint64_t worker = swapped ? e->alt_worker : e->worker;
        EventId id = params.keying == KeyingMode::slot ? EventId{"encounter.slot", {e->day, i, e->slot}, 0}
                                                       : EventId{"encounter.dyad", {e->day, i, worker}, 0};
        if (ctx.trial(id, i, e->risk)) {
            ++out.cases;
            out.infected[i - 1] = true;
            out.onset_day[i - 1] = static_cast<double>(e->day);
        }
    }
    return out;
}

RunOutcome simulate(const ModelSpec& spec, Mode mode, Scenario scenario, const WorldSeed& seed,
                    const RunOptions& options)
{
    if (const auto* inf = std::get_if<InfectionModelParams>(&spec))
        return simulate_infection(seed, *inf, scenario, mode, options);
    return simulate_clinic(seed, std::get<ClinicModelParams>(spec), scenario, mode, options);
}

} // namespace evrng
