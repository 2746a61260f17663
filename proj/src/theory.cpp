#include "snrlab/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace snrlab::theory {

double gamma_hat_step(double gamma_t, int t, const NoiseSchedule& sched) {
    if (!(gamma_t > 0.0 && gamma_t <= 1.0)) {
        throw std::invalid_argument("gamma_hat_step: gamma must lie in (0,1]");
    }
    const double a = sched.alpha(t);
    const double ab = sched.alpha_bar(t);
    const double ab_prev = sched.alpha_bar(t - 1);
    if (gamma_t == 1.0) {
        return 1.0;  // the numerator telescopes to 1 - alpha_bar_t
    }
    return ((1.0 - a) * gamma_t + a * (1.0 - ab_prev)) / (1.0 - ab);
}

StepLaw biased_step_law(double gamma_t, double phi_t, int t, const NoiseSchedule& sched) {
    const double ab_prev = sched.alpha_bar(t - 1);
    const double gh = gamma_hat_step(gamma_t, t, sched);
    const double inj = std::sqrt(ab_prev) * sched.beta(t) * phi_t / (1.0 - sched.alpha_bar(t));
    return {gh * std::sqrt(ab_prev), std::sqrt(1.0 - ab_prev + inj * inj)};
}

double psi(double gamma_hat_prev, double phi_t, int t, const NoiseSchedule& sched) {
    if (!(gamma_hat_prev > 0.0 && gamma_hat_prev <= 1.0)) {
        throw std::invalid_argument("psi: gamma_hat must lie in (0,1]");
    }
    const double ab_prev = sched.alpha_bar(t - 1);
    const double inj = std::sqrt(ab_prev) * sched.beta(t) * phi_t / (1.0 - sched.alpha_bar(t));
    return std::sqrt(inj * inj + (1.0 - gamma_hat_prev * gamma_hat_prev) * (1.0 - ab_prev));
}

double snr_theorem(double gamma_hat_t, double phi_next, int t, const NoiseSchedule& sched) {
    if (t >= sched.steps()) {
        throw std::invalid_argument("snr_theorem: needs t < T (uses t+1 entries)");
    }
    const double ab = sched.alpha_bar(t);
    const double inj =
        std::sqrt(ab) * sched.beta(t + 1) * phi_next / (1.0 - sched.alpha_bar(t + 1));
    return gamma_hat_t * gamma_hat_t * ab / (1.0 - ab + inj * inj);
}

double eta(double phi_t, double psi_prev) {
    if (phi_t < 0.0 || psi_prev < 0.0) {
        throw std::invalid_argument("eta: inputs must be non-negative");
    }
    return std::hypot(phi_t, psi_prev);
}

TheoryCurves compute_curves(const BiasProfile& profile, const NoiseSchedule& sched) {
    const int T = sched.steps();
    if (profile.steps() != T) {
        throw std::invalid_argument("theory curves: profile length must equal T");
    }
    TheoryCurves c;
    // psi_t for t = 0..T-1, derived from step t+1
    std::vector<double> psi_all(static_cast<std::size_t>(T));
    std::vector<double> gh_all(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
        const double gh = gamma_hat_step(profile.gamma(t), t, sched);
        gh_all[static_cast<std::size_t>(t - 1)] = gh;       // gamma_hat_{t-1}
        psi_all[static_cast<std::size_t>(t - 1)] =
            psi(gh, profile.phi(t), t, sched);              // psi_{t-1}
    }
    for (int t = 1; t < T; ++t) {
        c.t.push_back(t);
        c.gamma_hat.push_back(gh_all[static_cast<std::size_t>(t)]);
        c.psi.push_back(psi_all[static_cast<std::size_t>(t)]);
        c.snr_forward.push_back(sched.snr(t));
        c.snr_reverse.push_back(
            snr_theorem(gh_all[static_cast<std::size_t>(t)], profile.phi(t + 1), t, sched));
        c.eta.push_back(eta(profile.phi(t), psi_all[static_cast<std::size_t>(t - 1)]));
    }
    return c;
}

}  // namespace snrlab::theory
