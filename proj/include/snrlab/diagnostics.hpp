#pragma once

#include <cstdint>
#include <vector>

#include "snrlab/correction.hpp"
#include "snrlab/denoiser.hpp"
#include "snrlab/grid.hpp"
#include "snrlab/schedule.hpp"

namespace snrlab::diag {

// A per-timestep Monte Carlo curve with standard errors.
struct Curve {
    std::vector<int> t;
    std::vector<double> mean;
    std::vector<double> se;
};

// E||eps_hat(x_t, s)||^2/dim for a network conditioned on a fixed timestep s
// fed forward-perturbed samples x_t across mismatched t.
struct SlidingWindow {
    std::vector<int> s_list;
    std::vector<int> t_list;
    std::vector<std::vector<double>> mean;  // [s][t]
    std::vector<std::vector<double>> se;
    long long n = 0;
};

SlidingWindow sliding_window(const Denoiser& model, const NoiseSchedule& sched,
                             const GaussianMixture& data, std::vector<int> s_list,
                             std::vector<int> t_list, int n, std::uint64_t seed);

// Closed form of a sliding-window cell for single-mode zero-mean data with the
// exact denoiser: (1-ab_s) (ab_t s0^2 + 1-ab_t) / (ab_s s0^2 + 1-ab_s)^2.
double sliding_window_cell_exact(int s, int t, double var0, const NoiseSchedule& sched);

// E||eps_hat(x_t,t)||^2/dim from forward samples vs the same statistic along
// reverse chains, both under the same model.
struct ForwardReverse {
    Curve forward;
    Curve reverse;
};

ForwardReverse forward_vs_reverse(const Denoiser& model, const NoiseSchedule& sched,
                                  const GaussianMixture& data, const CorrectionConfig& corr,
                                  int n, std::uint64_t seed);

// E||x0_hat(x_t,t)||^2/dim forward and along reverse chains, next to the data
// norm E||x0||^2/dim (exact).
struct ReconNorms {
    Curve forward;
    Curve reverse;
    double data_msq = 0.0;
};

ReconNorms reconstruction_norms(const Denoiser& model, const NoiseSchedule& sched,
                                const GaussianMixture& data, int n, std::uint64_t seed);

// Teacher-forced one-step moment matching: draw x0, perturb to x_t, take one
// biased posterior step under the analytic bias law, then recover the signal
// coefficient from cov(x_hat_{t-1}, x0)/(var0 sqrt(alpha_bar_{t-1})) and the
// noise scale from the residual variance. Batch-mean standard errors.
struct GammaPsiEstimate {
    double gamma_hat = 0.0;
    double gamma_hat_se = 0.0;
    double noise_std = 0.0;
    double noise_std_se = 0.0;
    long long n = 0;
};

GammaPsiEstimate estimate_gamma_psi(const NoiseSchedule& sched, const GaussianMixture& data,
                                    const BiasProfile& profile, int t, int n,
                                    std::uint64_t seed, int n_batches = 50);

}  // namespace snrlab::diag
