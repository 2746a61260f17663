#pragma once

#include <vector>

#include "snrlab/denoiser.hpp"
#include "snrlab/schedule.hpp"

namespace snrlab::theory {

// gamma_hat_{t-1} = ((1-alpha_t) gamma_t + alpha_t (1-alpha_bar_{t-1})) / (1-alpha_bar_t).
// Maps (0,1] into (0,1]; equals 1 iff gamma_t = 1.
double gamma_hat_step(double gamma_t, int t, const NoiseSchedule& sched);

// Teacher-forced one-step law of the biased reverse step:
// x_hat_{t-1} = coef_x0 * x0 + noise_std * eps with
//   coef_x0  = gamma_hat_{t-1} sqrt(alpha_bar_{t-1})
//   noise_std = sqrt(1 - alpha_bar_{t-1} + (sqrt(alpha_bar_{t-1}) beta_t phi_t / (1-alpha_bar_t))^2)
struct StepLaw {
    double coef_x0 = 0.0;
    double noise_std = 0.0;
};
StepLaw biased_step_law(double gamma_t, double phi_t, int t, const NoiseSchedule& sched);

// psi_{t-1} = sqrt((sqrt(alpha_bar_{t-1}) beta_t phi_t/(1-alpha_bar_t))^2
//             + (1-gamma_hat_{t-1}^2)(1-alpha_bar_{t-1})).
// Consistency: gamma_hat^2 (1-alpha_bar_{t-1}) + psi^2 = noise_std^2.
double psi(double gamma_hat_prev, double phi_t, int t, const NoiseSchedule& sched);

// Reverse-sample SNR at t (< T):
// gamma_hat_t^2 alpha_bar_t / (1 - alpha_bar_t + (sqrt(alpha_bar_t) beta_{t+1} phi_{t+1}/(1-alpha_bar_{t+1}))^2).
// At gamma_hat = 1, phi = 0 this is exactly the forward snr(t); otherwise strictly below it.
double snr_theorem(double gamma_hat_t, double phi_next, int t, const NoiseSchedule& sched);

// eta_t = sqrt(phi_t^2 + psi_{t-1}^2): noise scale of the differential signal.
double eta(double phi_t, double psi_prev);

// All derived sequences for a profile, rows t = 1..T-1.
struct TheoryCurves {
    std::vector<int> t;
    std::vector<double> gamma_hat;    // gamma_hat_t (from step t+1)
    std::vector<double> psi;          // psi_t (from step t+1)
    std::vector<double> snr_forward;  // alpha_bar_t/(1-alpha_bar_t)
    std::vector<double> snr_reverse;  // theorem value at t
    std::vector<double> eta;          // eta_t = sqrt(phi_t^2 + psi_{t-1}^2)
};
TheoryCurves compute_curves(const BiasProfile& profile, const NoiseSchedule& sched);

}  // namespace snrlab::theory
