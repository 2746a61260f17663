#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "snrlab/correction.hpp"
#include "snrlab/denoiser.hpp"
#include "snrlab/grid.hpp"
#include "snrlab/schedule.hpp"

namespace snrlab {

// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps
Grid forward_perturb(const Grid& x0, int t, const Grid& eps, const NoiseSchedule& sched);

// eps-form reverse step:
// (1/sqrt(alpha_t)) (x_t - (1-alpha_t)/sqrt(1-alpha_bar_t) eps_hat) + sigma_t z.
// z may be null (treated as zero); it is forced to zero at t = 1.
Grid ancestral_step(const Grid& x_t, const Grid& eps_hat, const Grid* z, int t,
                    const NoiseSchedule& sched);

// x0-form of the same step via the posterior mean coefficients.
Grid posterior_step(const Grid& x_t, const Grid& x0_hat, const Grid* z, int t,
                    const NoiseSchedule& sched);

// Deterministic (eta = 0) step from t to t_prev < t:
// sqrt(alpha_bar_prev) x0_hat + sqrt(1 - alpha_bar_prev) eps_hat.
Grid ddim_step(const Grid& x_t, const Grid& eps_hat, int t, int t_prev,
               const NoiseSchedule& sched);

struct RecordFlags {
    bool states = false;
    bool x0_hat = false;
    bool eps_hat = false;
};

// One chain's reverse run. Per-step scalar summaries are always kept; full
// grids only when the corresponding record flag is set.
struct Trajectory {
    std::uint32_t chain_id = 0;
    std::uint64_t seed = 0;
    Grid terminal;                        // x_hat_0
    std::vector<double> state_msq;        // ||x_hat_t||^2/dim,   index t-1
    std::vector<double> eps_hat_msq;      // ||eps_hat(x_t,t)||^2/dim
    std::vector<double> x0_hat_msq;       // ||x0_hat(x_t,t)||^2/dim
    std::vector<Grid> states;             // x_hat_t for t = T..1 (before stepping)
    std::vector<Grid> x0_hats;            // per step
    std::vector<Grid> eps_hats;           // per step
};

struct RunOptions {
    int n_chains = 1;
    std::uint64_t seed = 0;
    RecordFlags record;
};

// Ancestral reverse runs with a per-step correction hook. Order per step t:
// predict x0_hat from x_hat_t, take the posterior step to x_hat_{t-1}, then
// correct x_hat_{t-1} with that step's x0_hat. The prediction input is never
// corrected. Chains draw all noise from (seed, chain, t)-keyed streams, so
// the result is identical for every worker count.
std::vector<Trajectory> run_reverse(const Denoiser& model, const NoiseSchedule& sched,
                                    const CorrectionConfig& corr, const RunOptions& opt);

}  // namespace snrlab
