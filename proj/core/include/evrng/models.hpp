#pragma once

// Reference micro-models, each runnable with a sequential (stateful) generator
// or with event-keyed draws.

#include "evrng/cbrng.hpp"
#include "evrng/eventkey.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace evrng {

enum class Mode { stateful, keyed };
enum class Scenario { baseline, intervention };
enum class KeyingMode { slot, dyad };

std::string_view to_string(Mode m) noexcept;
std::string_view to_string(Scenario s) noexcept;
std::string_view to_string(KeyingMode k) noexcept;
Mode parse_mode(std::string_view s);
Scenario parse_scenario(std::string_view s);
KeyingMode parse_keying(std::string_view s);

inline constexpr std::string_view kStatefulGeneratorId = "splitmix64";

/// splitmix64. Every call to next() advances the state exactly once.
class StatefulGenerator {
public:
    explicit StatefulGenerator(std::uint64_t state) noexcept
        : state_(state)
    {
    }
    /// Initial state is seed.hi ^ seed.lo.
    explicit StatefulGenerator(const WorldSeed& seed) noexcept
        : state_(seed.hi ^ seed.lo)
    {
    }

    std::uint64_t next_u64() noexcept;
    UnitUniform next() noexcept { return to_unit_uniform(next_u64()); }

    [[nodiscard]] std::uint64_t state() const noexcept { return state_; }
    [[nodiscard]] std::uint64_t draws() const noexcept { return draws_; }

private:
    std::uint64_t state_;
    std::uint64_t draws_ = 0;
};

UnitUniform stateful_next(StatefulGenerator& gen) noexcept;

struct InfectionModelParams {
    std::size_t n_agents = 100;
    std::vector<double> p_infect = std::vector<double>(100, 0.3);
    double vaccine_efficacy = 0.5;
    /// 1-based agent indices vaccinated in the intervention scenario.
    std::vector<std::size_t> vaccinated_agents{1};
    /// Intervention draws an efficacy check per vaccinated agent but leaves risk unchanged.
    bool placebo = false;
    double incubation_rate = 0.2;

    void validate() const;

    friend bool operator==(const InfectionModelParams&, const InfectionModelParams&) = default;
};

struct Encounter {
    std::uint64_t day = 0;
    std::uint64_t patient = 1;
    std::uint64_t slot = 1;
    std::uint64_t worker = 1;
    std::uint64_t alt_worker = 1;
    double risk = 0.0;

    friend bool operator==(const Encounter&, const Encounter&) = default;
};

struct ClinicModelParams {
    std::size_t n_patients = 20;
    std::size_t n_workers = 6;
    std::vector<Encounter> encounters;
    KeyingMode keying = KeyingMode::slot;
    /// The intervention scenario replaces each worker by its alternate.
    bool worker_swap = true;

    void validate() const;

    /// Patients 1..n, days 0..days-1, slots 1..slots_per_day, constant risk.
    static ClinicModelParams make_default(std::size_t n_patients = 20, std::size_t n_workers = 6,
                                          std::size_t days = 3, std::size_t slots_per_day = 2, double risk = 0.15);

    friend bool operator==(const ClinicModelParams&, const ClinicModelParams&) = default;
};

using ModelSpec = std::variant<InfectionModelParams, ClinicModelParams>;

std::string_view model_name(const ModelSpec& spec) noexcept;

/// One Bernoulli outcome event: y = [u < p].
struct TrialRecord {
    std::string event;
    std::size_t agent = 0; ///< 1-based
    double p = 0.0;
    double u = 0.0;
    bool y = false;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct DrawRecord {
    std::string event;
    std::uint64_t index = 0; ///< 1-based consumption order within the run
    double u = 0.0;

    friend bool operator==(const DrawRecord&, const DrawRecord&) = default;
};

struct NoiseEntry {
    double u = 0.0;
    /// Stateful: the draw index k. Keyed: order of the query within the run.
    std::uint64_t position = 0;

    friend bool operator==(const NoiseEntry&, const NoiseEntry&) = default;
};

struct RunOutcome {
    std::string model;
    Mode mode = Mode::keyed;
    Scenario scenario = Scenario::baseline;
    WorldSeed seed;

    std::uint64_t cases = 0;
    std::vector<bool> infected;
    std::vector<std::optional<double>> onset_day;

    std::vector<TrialRecord> trials;
    std::map<std::string, NoiseEntry> noise_map;
    bool has_trace = false;
    std::vector<DrawRecord> draw_trace;

    /// Bitwise equality of (cases, infected, onset_day).
    [[nodiscard]] bool same_outcome(const RunOutcome& other) const;

    friend bool operator==(const RunOutcome&, const RunOutcome&) = default;
};

struct RunOptions {
    /// Keep the per-draw trace in consumption order.
    bool trace = false;
    /// Fill trials and noise_map. Estimators that need only case counts turn this off.
    bool record_noise = true;
    /// Keyed mode only; every query is recorded here.
    EventLedger* ledger = nullptr;
};

RunOutcome simulate_infection_stateful(const WorldSeed& seed, const InfectionModelParams& params, Scenario scenario,
                                       const RunOptions& options = {});

RunOutcome simulate_infection_keyed(const WorldSeed& seed, const InfectionModelParams& params, Scenario scenario,
                                    const RunOptions& options = {});

/// Scenario::intervention is the swapped-worker scenario.
RunOutcome simulate_clinic(const WorldSeed& seed, const ClinicModelParams& params, Scenario scenario, Mode mode,
                           const RunOptions& options = {});

RunOutcome simulate(const ModelSpec& spec, Mode mode, Scenario scenario, const WorldSeed& seed,
                    const RunOptions& options = {});

} // namespace evrng
