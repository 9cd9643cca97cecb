// offsetsim — decoy-based nudge design and validation for flight carbon
// offsetting: simulate persona-conditioned choice agents over a decoy
// parameter grid, analyze survey responses, and quantify CO2 impact.

#include <iostream>

#include <CLI11.hpp>

#include "offsetsim/errors.hpp"
#include "offsetsim/orchestrator.hpp"

using namespace offsetsim;

int main(int argc, char** argv) {
    CLI::App app{"decoy-nudge simulation and inference toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    app.add_option("-c,--config", config_path, "key-value config file")
        ->check(CLI::ExistingFile);

    // flag overrides; config-file keys fill everything else
    long long seed = -1;
    std::string output_dir, backend, respondents, groups_csv;
    int concurrency = 0, max_segments = -1, max_cells = -1, repetitions = -1, permutations = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed (overrides run.master_seed)");
        cmd->add_option("--output", output_dir, "output directory");
        cmd->add_option("--concurrency", concurrency, "worker ceiling for the sweep");
        return cmd;
    };

    CLI::App* simulate = add_common(app.add_subcommand(
        "simulate", "run the persona x decoy-grid sweep and write its artifacts"));
    simulate->add_option("--backend", backend, "agent backend: synthetic or remote_llm");
    simulate->add_option("--max-segments", max_segments, "limit segment count (smoke runs)");
    simulate->add_option("--max-cells", max_cells, "limit decoy-cell count (smoke runs)");
    simulate->add_option("--repetitions", repetitions, "repetitions per option order");

    CLI::App* analyze = add_common(
        app.add_subcommand("analyze", "run the hypothesis battery on a respondent file"));
    analyze->add_option("--respondents", respondents, "respondent CSV file");
    analyze->add_option("--groups", groups_csv, "predicted-groups CSV file");
    analyze->add_option("--permutations", permutations, "ANOVA permutation count");

    add_common(app.add_subcommand("impact", "compute the annual CO2 accounting table"));
    app.add_subcommand("validate-config", "check the configuration and exit");
    CLI::App* export_grid =
        app.add_subcommand("export-grid", "write the segment list and decoy grid as CSV");
    export_grid->add_option("--output", output_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_run_config(config_path);
        if (seed >= 0) {
            cfg.master_seed = static_cast<std::uint64_t>(seed);
            cfg.seed_explicit = true;
        }
        if (!output_dir.empty()) {
            cfg.paths.output_dir = output_dir;
            // keep derived paths anchored to the chosen directory
            cfg.paths.groups_csv = output_dir + "/predicted_groups.csv";
            cfg.paths.cache_file = output_dir + "/state/response_cache.jsonl";
            cfg.agent.cache_path = cfg.paths.cache_file;
        }
        if (concurrency > 0) cfg.concurrency = concurrency;
        if (!backend.empty()) {
            if (backend == "synthetic")
                cfg.agent.backend = AgentBackend::Synthetic;
            else if (backend == "remote_llm") {
                cfg.agent.backend = AgentBackend::RemoteLlm;
                apply_agent_env(cfg.agent);
            } else
                throw ConfigError("--backend must be synthetic or remote_llm");
        }
        if (max_segments >= 0) cfg.limits.max_segments = max_segments;
        if (max_cells >= 0) cfg.limits.max_cells = max_cells;
        if (repetitions > 0) cfg.schedule.repetitions = repetitions;
        if (permutations > 0) cfg.analysis.n_permutations = permutations;
        if (!respondents.empty()) cfg.paths.respondents_csv = respondents;
        if (!groups_csv.empty()) cfg.paths.groups_csv = groups_csv;

        if (app.got_subcommand("simulate")) command_simulate(cfg, std::cout);
        if (app.got_subcommand("analyze")) command_analyze(cfg, std::cout);
        if (app.got_subcommand("impact")) command_impact(cfg, std::cout);
        if (app.got_subcommand("validate-config")) command_validate(cfg, std::cout);
        if (app.got_subcommand("export-grid")) command_export_grid(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
