#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "snrlab/config.hpp"

namespace snrlab::harness {

struct MetricRecord {
    std::string name;
    double value = 0.0;
    double stderr_ = 0.0;
    long long n_a = 0;
    long long n_b = 0;
    std::uint64_t seed = 0;
};

struct ExperimentReport {
    std::string experiment;
    std::filesystem::path out_dir;
    std::vector<std::filesystem::path> outputs;
    std::vector<MetricRecord> metrics;
    double wall_clock_s = 0.0;
};

// Runs the configured experiment, writes its CSVs plus manifest.json under
// <out_root>/<config-name>/.
ExperimentReport run_experiment(const Config& cfg, const std::filesystem::path& out_root);

struct SearchPoint {
    int stage = 0;          // 1: low band, 2: high band
    double value = 0.0;     // searched scalar (low: lambda_l; high: 1 - lambda_h)
    double objective = 0.0;
    double stderr_ = 0.0;
};

struct SearchResult {
    double lambda_l_star = 0.0;
    double lambda_h_star = 1.0;   // high weight = (1 - lambda_h) sigma_t
    double objective_baseline = 0.0;
    double objective_star = 0.0;
    double improvement_se = 0.0;  // paired-batch SE of (baseline - best)
    std::vector<SearchPoint> trace;
};

// Two-stage hyperparameter search with common random numbers: a coarse sweep
// over the low-band scale (step search.coarse_step, grid includes 0), a fine
// sweep around its best point, then the same for the high-band scale with the
// low optimum fixed. Objective: energy distance between terminal samples and
// fresh data draws. Ties break toward the smaller value.
SearchResult two_stage_search(const Config& cfg, const std::filesystem::path& out_root);

// Invariant suite: schedule identities, wavelet round trip, step-form
// equivalence, zero-lambda identities, theorem degeneracy, determinism.
// Returns the number of failed checks and prints one line per check.
int selftest();

// Writes schedule.csv for the configured schedule.
ExperimentReport schedule_dump(const Config& cfg, const std::filesystem::path& out_root);

// Writes theory_curves.csv for the configured profile and schedule.
ExperimentReport theory_dump(const Config& cfg, const std::filesystem::path& out_root);

}  // namespace snrlab::harness
