#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Event-keyed counterfactual simulation experiments"};
    app.require_subcommand(1);

    evrng::cli::CliOptions options;
    const std::pair<const char*, const char*> subcommands[] = {
        {"run", "Simulate one scenario and write run.json"},
        {"paired", "Paired replicates and the treatment-effect estimate"},
        {"placebo", "Baseline vs placebo divergence over many seeds"},
        {"variance", "Estimator variance under independent, stateful and keyed coupling"},
        {"sobol", "First-order Sobol index for one parameter"},
        {"audit", "Draw-index audit of the two scenarios of one seed"},
        {"strata", "Principal-strata census (keyed mode only)"},
    };
    for (const auto& [name, help] : subcommands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", options.config_path, "Experiment config (JSON)");
        sub->add_option("--out", options.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--threads", options.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_flag("--strict-ledger", options.strict_ledger, "Fail on a repeated event key");
        sub->add_flag("--trace", options.trace, "Keep per-draw traces");
        if (std::string_view(name) == "audit")
            sub->add_option("--inputs", options.inputs, "Two run.json files to compare")->expected(2);
    }

    CLI11_PARSE(app, argc, argv);
    return evrng::cli::run_command(app.get_subcommands().front()->get_name(), options, std::cout, std::cerr);
}
