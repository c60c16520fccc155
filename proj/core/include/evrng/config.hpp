#pragma once

// Experiment configuration: a single JSON document that fully determines a run.

#include "evrng/counterfactual.hpp"
#include "evrng/models.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evrng {

inline constexpr std::string_view kDefaultSeedStream = "243f6a8885a308d313198a2e03707344";

struct SobolSettings {
    std::string parameter = "placebo";
    std::vector<double> grid{0.0, 1.0};
    std::size_t m_inner = 200;

    friend bool operator==(const SobolSettings&, const SobolSettings&) = default;
};

struct ExperimentConfig {
    std::string model = "infection";
    Mode mode = Mode::keyed;
    /// Scenario for single runs.
    Scenario scenario = Scenario::baseline;
    ScenarioPair scenario_pair;
    WorldSeed seed_stream = WorldSeed::from_hex(kDefaultSeedStream);
    /// World seed for single runs; the seed stream itself when unset.
    std::optional<WorldSeed> seed;
    std::size_t m = 1000;
    std::size_t n_seeds = 1000;
    Observable observable;
    InfectionModelParams infection;
    ClinicModelParams clinic = ClinicModelParams::make_default();
    SobolSettings sobol;
    bool strict_ledger = false;
    bool trace = false;
    bool csv = true;

    [[nodiscard]] ModelSpec model_spec() const;
    [[nodiscard]] WorldSeed run_seed() const { return seed.value_or(seed_stream); }
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Config errors carry the offending field path ("infection.p_infect[3]") or
/// the line and column of a syntax error.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what)
        : std::runtime_error(what)
    {
    }
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig parse_config(std::string_view text, std::string_view source = "config");
ExperimentConfig load_config(const std::string& path);

/// Digest of the canonical config JSON with "scenario" removed, so the two
/// single-scenario runs of one experiment share it.
std::string config_digest(const ExperimentConfig& c);

} // namespace evrng
