#pragma once

// JSON and CSV forms of runs and reports. Every number is written with
// shortest round-trip formatting and object keys are sorted, so equal inputs
// give byte-identical files.

#include "evrng/analysis.hpp"
#include "evrng/config.hpp"
#include "evrng/counterfactual.hpp"
#include "evrng/models.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>

namespace evrng {

/// {generators, mode, seed_stream, config_digest, config}
nlohmann::json provenance(const ExperimentConfig& config);

/// Keys: model, mode, scenario, seed, cases, infected, onset_day, trials,
/// noise_map ([{event, u, position}] sorted by event) and, when traced,
/// draw_trace ([{event, index, u}] in consumption order).
nlohmann::json to_json(const RunOutcome& run, bool include_trace = true);
RunOutcome run_outcome_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AteReport& r);
nlohmann::json to_json(const StrataCensus& c);
nlohmann::json to_json(const PlaceboReport& r);
nlohmann::json to_json(const VarianceComparison& v);
nlohmann::json to_json(const SobolReport& r);
nlohmann::json to_json(const AuditTable& t);

/// Columns: index,seed,y0,y1,ite
std::string replicates_csv(std::span<const PairedReplicate> reps);
/// Columns: m,delta_hat,var_y0,var_y1,cov,var_delta_hat,var_ite,cov_se
std::string ate_csv(const AteReport& r);
/// Columns: arm,m,delta_hat,var_y0,var_y1,cov,var_delta_hat,var_ite,cov_se
std::string variance_csv(const VarianceComparison& v);
/// Columns: stratum,count
std::string strata_csv(const StrataCensus& c);
/// Columns: index,seed,outcome_divergent,first_event,u_baseline,u_placebo,position_baseline,position_placebo
std::string placebo_csv(const PlaceboReport& r);
/// Columns: value,conditional_mean
std::string sobol_csv(const SobolReport& r);
/// Columns: event,index0,index1,u0,u1,match
std::string audit_csv(const AuditTable& t);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

} // namespace evrng
