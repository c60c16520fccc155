#pragma once

// Paired runs across scenarios, treatment-effect estimators and principal
// strata for Bernoulli outcome events.

#include "evrng/models.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evrng {

struct ScenarioPair {
    Scenario first = Scenario::baseline;
    Scenario second = Scenario::intervention;

    friend bool operator==(const ScenarioPair&, const ScenarioPair&) = default;
};

/// Which scalar of a run is the outcome Y. Default is the total case count;
/// with `agent` set it is that agent's infection indicator.
struct Observable {
    std::optional<std::size_t> agent;

    [[nodiscard]] double operator()(const RunOutcome& run) const;

    friend bool operator==(const Observable&, const Observable&) = default;
};

struct PairedReplicate {
    std::uint64_t index = 0;
    WorldSeed seed;
    double y0 = 0.0;
    double y1 = 0.0;
    double ite = 0.0;
    RunOutcome outcome0;
    RunOutcome outcome1;
};

struct PairedOptions {
    RunOptions run;
    Observable observable;
    unsigned threads = 1;
    /// Replicate m uses derive_seed(stream, seed_label, m).
    std::string seed_label = "replicate";
    /// When set, the second scenario of replicate m uses derive_seed(stream, label, m)
    /// instead of sharing the first scenario's seed.
    std::optional<std::string> second_seed_label;
    bool strict_ledger = false;
};

class ReplicateError : public std::runtime_error {
public:
    ReplicateError(std::uint64_t index, const std::string& what)
        : std::runtime_error("replicate " + std::to_string(index) + ": " + what)
        , index_(index)
    {
    }
    [[nodiscard]] std::uint64_t index() const noexcept { return index_; }

private:
    std::uint64_t index_;
};

/// m >= 2. Both scenarios of replicate m run on the same world seed.
std::vector<PairedReplicate> run_paired(std::size_t m, const ModelSpec& spec, ScenarioPair pair, Mode mode,
                                        const WorldSeed& seed_stream, const PairedOptions& options = {});

struct AteReport {
    std::size_t m = 0;
    double delta_hat = 0.0;
    double var_y0 = 0.0;
    double var_y1 = 0.0;
    double cov = 0.0;
    /// (var_y0 + var_y1 - 2 cov) / m
    double var_delta_hat = 0.0;
    /// Sample variance of the individual differences, computed directly.
    double var_ite = 0.0;
    /// Plug-in standard error of `cov`.
    double cov_se = 0.0;
};

/// Unbiased (m - 1) moments throughout. Throws std::invalid_argument for m < 2.
AteReport estimate_ate(std::span<const double> y0, std::span<const double> y1);
AteReport estimate_ate(std::span<const PairedReplicate> reps);

enum class StratumLabel { always_infected, preventable, never_infected };

std::string_view to_string(StratumLabel s) noexcept;

/// Requires 0 <= p1 <= p0 <= 1.
StratumLabel classify_stratum(UnitUniform u, double p0, double p1);

/// A trial event seen in both runs.
struct MatchedTrial {
    std::string event;
    std::size_t agent = 0;
    double p0 = 0.0;
    double p1 = 0.0;
    double u0 = 0.0;
    double u1 = 0.0;
    bool y0 = false;
    bool y1 = false;

    [[nodiscard]] bool same_noise() const noexcept { return u0 == u1; }
};

struct EventMatch {
    std::vector<MatchedTrial> matched;
    /// Trial events that occur in one run only; no counterpart to compare against.
    std::vector<TrialRecord> unmatched0;
    std::vector<TrialRecord> unmatched1;
};

EventMatch match_events(const RunOutcome& o0, const RunOutcome& o1);

/// Per agent (index 0 is agent 1): y1 - y0 of the infection indicator, or
/// nullopt when any of that agent's trial events is unmatched.
std::vector<std::optional<int>> individual_ite(const RunOutcome& o0, const RunOutcome& o1);

class StrataUnidentifiable : public std::logic_error {
public:
    StrataUnidentifiable()
        : std::logic_error("stateful mode: strata unidentifiable (noise is indexed by draw position, not event)")
    {
    }
};

struct StrataCensus {
    std::array<std::uint64_t, 3> counts{};          ///< indexed by StratumLabel
    std::array<std::array<std::uint64_t, 2>, 2> observed{}; ///< [y0][y1]
    std::uint64_t shared_events = 0;
    std::uint64_t prediction_mismatches = 0;
    std::uint64_t noise_mismatches = 0;
    std::uint64_t unmatched_events = 0;
};

using EventFilter = std::function<bool(std::string_view event)>;

/// Keyed-mode replicates only; stateful outcomes throw StrataUnidentifiable.
StrataCensus strata_census(std::span<const PairedReplicate> reps, const EventFilter& filter = {});

/// Runs ordered by increasing treatment strength; counts matched trial events
/// whose outcome goes 0 -> 1 between consecutive runs.
std::uint64_t count_monotonicity_violations(std::span<const RunOutcome> ordered);

} // namespace evrng
