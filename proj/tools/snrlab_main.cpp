#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "snrlab/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"snrlab: diffusion-sampling bias laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_root = "runs";

    auto add_config_cmd = [&](const char* name, const char* desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->add_option("config", config_path, "flat key=value config file")->required();
        cmd->add_option("--out", out_root, "output root directory");
        return cmd;
    };

    CLI::App* run = add_config_cmd("run", "run the configured experiment");
    CLI::App* search = add_config_cmd("search", "two-stage correction-weight search");
    CLI::App* theory = add_config_cmd("theory", "emit the derived theory curves");
    CLI::App* sched_dump = add_config_cmd("schedule-dump", "emit per-timestep schedule scalars");
    CLI::App* selftest = app.add_subcommand("selftest", "run the invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (selftest->parsed()) {
            return snrlab::harness::selftest() == 0 ? 0 : 1;
        }
        const auto cfg = snrlab::Config::load(config_path);
        if (run->parsed()) {
            const auto report = snrlab::harness::run_experiment(cfg, out_root);
            std::printf("experiment %s: %zu output file(s) under %s (%.2f s)\n",
                        report.experiment.c_str(), report.outputs.size() + 1,
                        report.out_dir.string().c_str(), report.wall_clock_s);
            for (const auto& m : report.metrics) {
                std::printf("  %-28s %.6g (se %.3g)\n", m.name.c_str(), m.value, m.stderr_);
            }
        } else if (search->parsed()) {
            const auto result = snrlab::harness::two_stage_search(cfg, out_root);
            std::printf("lambda_l* = %.4f\n", result.lambda_l_star);
            std::printf("lambda_h* = %.4f  (high weight %.4f * sigma_t)\n", result.lambda_h_star,
                        1.0 - result.lambda_h_star);
            std::printf("objective: baseline %.6g -> best %.6g (paired se %.3g)\n",
                        result.objective_baseline, result.objective_star,
                        result.improvement_se);
        } else if (theory->parsed()) {
            const auto report = snrlab::harness::theory_dump(cfg, out_root);
            std::printf("theory curves written under %s\n", report.out_dir.string().c_str());
        } else if (sched_dump->parsed()) {
            const auto report = snrlab::harness::schedule_dump(cfg, out_root);
            std::printf("schedule written under %s\n", report.out_dir.string().c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
