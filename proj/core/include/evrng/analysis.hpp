#pragma once

// Experiments: placebo divergence, variance comparison across coupling
// schemes, first-order Sobol indices and draw-index audits.

#include "evrng/counterfactual.hpp"
#include "evrng/models.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evrng {

/// Earliest event (in baseline consumption order) present in both runs whose noise differs.
struct NoiseMismatch {
    std::string event;
    double u_baseline = 0.0;
    double u_placebo = 0.0;
    std::uint64_t position_baseline = 0;
    std::uint64_t position_placebo = 0;
};

struct SeedDivergence {
    std::uint64_t index = 0;
    WorldSeed seed;
    /// Any difference in (cases, infected, onset_day).
    bool outcome_divergent = false;
    std::optional<NoiseMismatch> first_mismatch;
};

struct PlaceboReport {
    Mode mode = Mode::keyed;
    std::size_t n_seeds = 0;
    std::size_t n_divergent = 0;
    /// Identical outcomes but some shared event received different noise.
    std::size_t n_latent_divergent = 0;
    std::vector<SeedDivergence> seeds;
};

/// Seed s is derive_seed(stream, "placebo", s). Baseline vs the intervention
/// scenario with placebo forced on.
PlaceboReport placebo_experiment(std::size_t n_seeds, const InfectionModelParams& params, Mode mode,
                                 const WorldSeed& seed_stream, unsigned threads = 1);

std::optional<NoiseMismatch> first_noise_mismatch(const RunOutcome& baseline, const RunOutcome& other);

struct VarianceComparison {
    std::size_t m = 0;
    AteReport independent;
    AteReport crn_stateful;
    AteReport crn_keyed;
    bool keyed_le_independent = false;
    bool keyed_le_stateful = false;
    bool stateful_le_independent = false;
};

/// Seed namespaces: both CRN arms use "replicate"; the independent arm runs
/// keyed mode on "independent.0" / "independent.1". m >= 100.
VarianceComparison variance_comparison(std::size_t m, const ModelSpec& spec, ScenarioPair pair,
                                       const WorldSeed& seed_stream, unsigned threads = 1);

struct SobolReport {
    std::string parameter;
    Mode mode = Mode::keyed;
    std::size_t m_inner = 0;
    std::vector<double> grid;
    std::vector<double> conditional_means;
    double v_i = 0.0;
    double total_variance = 0.0;
    std::optional<double> s_i;
    std::string undefined_reason;
};

/// Parameters: "ve", "p_infect", "incubation_rate" (intervention scenario with
/// the value substituted) and "placebo" (0 -> baseline, otherwise placebo
/// intervention; mechanistically a null parameter). World w is
/// derive_seed(stream, "sobol", w) for every grid value.
SobolReport sobol_first_order(const InfectionModelParams& base, std::string_view parameter,
                              std::span<const double> grid, std::size_t m_inner, Mode mode,
                              const WorldSeed& seed_stream, unsigned threads = 1);

struct AuditRow {
    std::string event;
    std::optional<std::uint64_t> index0;
    std::optional<std::uint64_t> index1;
    std::optional<double> u0;
    std::optional<double> u1;

    [[nodiscard]] bool shared() const noexcept { return index0 && index1; }
    [[nodiscard]] bool noise_matches() const noexcept { return shared() && *u0 == *u1; }
};

struct AuditTable {
    std::vector<AuditRow> rows;
    std::size_t n_shared = 0;
    std::size_t n_mismatched = 0;
    /// index1 - index0 over shared events -> count.
    std::map<std::int64_t, std::size_t> shifts;

    [[nodiscard]] std::vector<std::string> mismatched_events() const;
    [[nodiscard]] const AuditRow* find(std::string_view event) const;
};

/// Both outcomes must carry draw traces (std::invalid_argument otherwise).
AuditTable draw_index_audit(const RunOutcome& o0, const RunOutcome& o1);

} // namespace evrng
