#include "snrlab/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace snrlab {

NoiseSchedule::NoiseSchedule(std::vector<double> beta, SigmaMode mode)
    : T_(static_cast<int>(beta.size())), mode_(mode), beta_(std::move(beta)) {
    if (T_ < 1) {
        throw std::invalid_argument("schedule: T must be >= 1");
    }
    alpha_.resize(beta_.size());
    alpha_bar_.resize(beta_.size() + 1);
    beta_tilde_.resize(beta_.size());
    alpha_bar_[0] = 1.0;
    for (int t = 1; t <= T_; ++t) {
        const double b = beta_[t - 1];
        if (!(b > 0.0 && b < 1.0)) {
            throw std::invalid_argument("schedule: beta_" + std::to_string(t) +
                                        " outside (0,1)");
        }
        alpha_[t - 1] = 1.0 - b;
        alpha_bar_[t] = alpha_bar_[t - 1] * alpha_[t - 1];
        beta_tilde_[t - 1] = (1.0 - alpha_bar_[t - 1]) / (1.0 - alpha_bar_[t]) * b;
    }
}

NoiseSchedule NoiseSchedule::linear(int T, double beta_start, double beta_end, SigmaMode mode) {
    if (T < 1) {
        throw std::invalid_argument("schedule: T must be >= 1");
    }
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw std::invalid_argument("schedule: need 0 < beta_start <= beta_end < 1");
    }
    std::vector<double> beta(static_cast<std::size_t>(T));
    if (T == 1) {
        beta[0] = beta_start;
    } else {
        const double step = (beta_end - beta_start) / static_cast<double>(T - 1);
        for (int t = 0; t < T; ++t) {
            beta[static_cast<std::size_t>(t)] = beta_start + step * t;
        }
        beta.back() = beta_end;
    }
    return NoiseSchedule(std::move(beta), mode);
}

NoiseSchedule NoiseSchedule::cosine(int T, double s, SigmaMode mode, double beta_clip) {
    if (T < 1) {
        throw std::invalid_argument("schedule: T must be >= 1");
    }
    if (!(s > 0.0)) {
        throw std::invalid_argument("schedule: cosine offset s must be positive");
    }
    auto f = [&](double t) {
        const double z = (t / T + s) / (1.0 + s) * std::numbers::pi / 2.0;
        const double c = std::cos(z);
        return c * c;
    };
    const double f0 = f(0.0);
    std::vector<double> beta(static_cast<std::size_t>(T));
    double prev = 1.0;
    for (int t = 1; t <= T; ++t) {
        const double ab = f(static_cast<double>(t)) / f0;
        double b = 1.0 - ab / prev;
        b = std::min(b, beta_clip);
        beta[static_cast<std::size_t>(t - 1)] = b;
        // alpha_bar is rebuilt from the clipped betas so the product identity
        // alpha_bar_t = alpha_bar_{t-1} * alpha_t stays exact
        prev = prev * (1.0 - b);
    }
    return NoiseSchedule(std::move(beta), mode);
}

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas, SigmaMode mode) {
    return NoiseSchedule(std::move(betas), mode);
}

NoiseSchedule NoiseSchedule::desk_default(int T, SigmaMode mode) {
    const double scale = 1000.0 / static_cast<double>(T);
    const double b1 = std::min(0.02 * scale, 0.999);
    const double b0 = std::min(1e-4 * scale, b1);
    return linear(T, b0, b1, mode);
}

void NoiseSchedule::check_t(int t, int lo) const {
    if (t < lo || t > T_) {
        throw std::out_of_range("schedule: timestep " + std::to_string(t) + " outside [" +
                                std::to_string(lo) + "," + std::to_string(T_) + "]");
    }
}

double NoiseSchedule::beta(int t) const {
    check_t(t, 1);
    return beta_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha(int t) const {
    check_t(t, 1);
    return alpha_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha_bar(int t) const {
    check_t(t, 0);
    return alpha_bar_[static_cast<std::size_t>(t)];
}

double NoiseSchedule::beta_tilde(int t) const {
    check_t(t, 1);
    return beta_tilde_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::sigma2(int t) const {
    check_t(t, 1);
    return mode_ == SigmaMode::large ? beta_[static_cast<std::size_t>(t - 1)]
                                     : beta_tilde_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::sigma(int t) const { return std::sqrt(sigma2(t)); }

double NoiseSchedule::snr(int t) const {
    check_t(t, 1);
    const double ab = alpha_bar_[static_cast<std::size_t>(t)];
    return ab / (1.0 - ab);
}

}  // namespace snrlab
