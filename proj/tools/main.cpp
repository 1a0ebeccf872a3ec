#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamplan/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

void print_plan(const beamplan::BeamPlan& plan) {
    std::printf("beams: %d\n", plan.n_beams());
    for (int b = 0; b < plan.n_beams(); ++b) {
        const auto& beam = plan.beams[b];
        std::printf("  beam %d: users {", b);
        for (std::size_t i = 0; i < beam.users.size(); ++i)
            std::printf("%s%d", i ? ", " : "", beam.users[i]);
        std::printf("}  center (%.4f, %.4f)\n", beam.center.lat_deg(), beam.center.lon_deg());
    }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int trials,
            long long seed, const std::vector<std::string>& algorithms, int workers) {
    beamplan::ScenarioConfig cfg;
    try {
        cfg = beamplan::load_config_file(config_path);
        if (trials > 0) cfg.n_trials = trials;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (workers > 0) cfg.workers = workers;
        if (!algorithms.empty()) {
            cfg.algorithms.clear();
            for (const auto& name : algorithms)
                cfg.algorithms.push_back(beamplan::algorithm_from_string(name));
        }
        beamplan::validate(cfg);
    } catch (const beamplan::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }

    beamplan::RunResult result;
    try {
        result = beamplan::run(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return kExitConfig;
    }

    try {
        beamplan::write_outputs(result, out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitIo;
    }

    for (const auto& algo : cfg.algorithms) {
        const auto& ja = result.document["aggregates"][beamplan::to_string(algo)];
        std::printf("%-14s K=%d  min CNR %.2f dB  avg CNR %.2f dB  load gap %.3f  beams %.2f\n",
                    beamplan::to_string(algo).c_str(), cfg.n_users,
                    ja["min_cnr_db"].get<double>(), ja["avg_cnr_db"].get<double>(),
                    ja["avg_load_gap"].get<double>(), ja["avg_n_beams"].get<double>());
    }

    if (result.max_beams_exceeded) {
        std::fprintf(stderr, "warning: a plan exceeded the beam budget\n");
        return kExitInfeasible;
    }
    return kExitOk;
}

int cmd_example1(const std::string& out_dir) {
    beamplan::ScenarioConfig cfg;
    cfg.fixed_users = beamplan::example1_users();
    cfg.n_users = static_cast<int>(cfg.fixed_users.size());
    cfg.n_trials = 1;
    cfg.algorithms = {beamplan::Algorithm::Stage1Only, beamplan::Algorithm::TwoStage};

    const auto sat = cfg.satellite();
    const auto graph =
        beamplan::build_graph(cfg.fixed_users, sat, cfg.link.half_beamwidth_deg);
    const auto plan = beamplan::stage1(cfg.fixed_users, graph, cfg.stage1);
    std::printf("first-stage partition (minimum beam count):\n");
    print_plan(plan);

    const auto refined = beamplan::refine(plan, cfg.fixed_users, graph, cfg.balancer);
    std::printf("after load-balancing refinement%s:\n",
                refined.fell_back ? " (fell back to first stage)" : "");
    print_plan(refined.plan);

    if (!out_dir.empty()) {
        try {
            beamplan::write_outputs(beamplan::run(cfg), out_dir);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "i/o error: %s\n", e.what());
            return kExitIo;
        }
    }
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    try {
        const auto cfg = beamplan::load_config_file(config_path);
        std::printf("ok: %d user(s), %d trial(s), %zu algorithm(s)\n", cfg.n_users,
                    cfg.n_trials, cfg.algorithms.size());
        return kExitOk;
    } catch (const beamplan::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint beam placement and load balancing for multi-beam satellites"};
    app.require_subcommand(1);
    app.footer(beamplan::config_schema_help());

    std::string config_path;
    std::string out_dir = "out";
    int trials = 0;
    long long seed = -1;
    int workers = 0;
    std::vector<std::string> algorithms;

    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write result files");
    run_cmd->add_option("--config", config_path, "Scenario config (JSON or key=value)")
        ->required();
    run_cmd->add_option("--out", out_dir, "Output directory (default: out)");
    run_cmd->add_option("--trials", trials, "Override the trial count");
    run_cmd->add_option("--seed", seed, "Override the scenario seed");
    run_cmd->add_option("--algorithms", algorithms, "Override the algorithm list")
        ->delimiter(',');
    run_cmd->add_option("--workers", workers, "Override the worker count");

    std::string example_out;
    auto* example_cmd =
        app.add_subcommand("example1", "Run the pinned 10-user demo and print the partition");
    example_cmd->add_option("--out", example_out, "Also write result files here");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a config file and exit");
    validate_cmd->add_option("--config", validate_path, "Scenario config to check")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, out_dir, trials, seed, algorithms, workers);
        if (example_cmd->parsed()) return cmd_example1(example_out);
        if (validate_cmd->parsed()) return cmd_validate(validate_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
