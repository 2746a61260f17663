#include "snrlab/denoiser.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace snrlab {

GaussianMixture::GaussianMixture(std::vector<GmmMode> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) {
        throw std::invalid_argument("gmm: at least one mode required");
    }
    shape_ = modes_.front().mean.shape();
    double wsum = 0.0;
    for (const auto& m : modes_) {
        if (!(m.weight > 0.0)) {
            throw std::invalid_argument("gmm: mode weights must be positive");
        }
        if (!(m.var > 0.0)) {
            throw std::invalid_argument("gmm: mode variances must be positive");
        }
        if (!(m.mean.shape() == shape_)) {
            throw std::invalid_argument("gmm: all mode means must share one shape");
        }
        wsum += m.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12) {
        throw std::invalid_argument("gmm: mode weights must sum to 1");
    }
}

double GaussianMixture::mean_sq_per_dim() const {
    double total = 0.0;
    for (const auto& m : modes_) {
        total += m.weight * (m.mean.mean_sq() + m.var);
    }
    return total;
}

Grid GaussianMixture::sample(std::uint64_t seed, std::uint32_t index) const {
    std::size_t pick = 0;
    if (modes_.size() > 1) {
        const double u =
            rng::uniform_unit({seed, index, 0, rng::Purpose::mode_pick});
        double acc = 0.0;
        for (std::size_t k = 0; k < modes_.size(); ++k) {
            acc += modes_[k].weight;
            if (u < acc) {
                pick = k;
                break;
            }
            pick = k;
        }
    }
    const GmmMode& m = modes_[pick];
    Grid x = m.mean;
    rng::NormalStream stream({seed, index, 0, rng::Purpose::data_x0});
    const double sd = std::sqrt(m.var);
    for (int i = 0; i < x.size(); ++i) {
        x[i] += sd * stream.next();
    }
    return x;
}

Grid GaussianMixture::posterior_x0(const Grid& x, int t, const NoiseSchedule& sched) const {
    if (!(x.shape() == shape_)) {
        throw std::invalid_argument("gmm posterior: shape mismatch");
    }
    const double ab = sched.alpha_bar(t);
    const double sab = std::sqrt(ab);
    const int n = x.size();

    if (modes_.size() == 1) {
        const GmmMode& m = modes_.front();
        const double v = ab * m.var + 1.0 - ab;
        const double shrink = sab * m.var / v;
        Grid out(shape_);
        for (int i = 0; i < n; ++i) {
            out[i] = m.mean[i] + shrink * (x[i] - sab * m.mean[i]);
        }
        return out;
    }

    // log responsibilities under x | mode k ~ N(sqrt(ab) mu_k, (ab s_k^2 + 1 - ab) I)
    std::vector<double> logr(modes_.size());
    double logmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const GmmMode& m = modes_[k];
        const double v = ab * m.var + 1.0 - ab;
        double q = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = x[i] - sab * m.mean[i];
            q += d * d;
        }
        logr[k] = std::log(m.weight) - 0.5 * n * std::log(v) - 0.5 * q / v;
        logmax = std::max(logmax, logr[k]);
    }
    double norm = 0.0;
    for (double& lr : logr) {
        lr = std::exp(lr - logmax);
        norm += lr;
    }
    Grid out(shape_);
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const double r = logr[k] / norm;
        if (r == 0.0) {
            continue;
        }
        const GmmMode& m = modes_[k];
        const double v = ab * m.var + 1.0 - ab;
        const double shrink = sab * m.var / v;
        for (int i = 0; i < n; ++i) {
            out[i] += r * (m.mean[i] + shrink * (x[i] - sab * m.mean[i]));
        }
    }
    return out;
}

BiasProfile::BiasProfile(std::vector<double> gamma, std::vector<double> phi)
    : gamma_(std::move(gamma)), phi_(std::move(phi)) {
    if (gamma_.empty() || gamma_.size() != phi_.size()) {
        throw std::invalid_argument("bias profile: gamma and phi need equal nonzero length");
    }
    for (std::size_t i = 0; i < gamma_.size(); ++i) {
        if (!(gamma_[i] > 0.0 && gamma_[i] <= 1.0)) {
            throw std::invalid_argument("bias profile: gamma must lie in (0,1]");
        }
        if (!(phi_[i] >= 0.0) || !std::isfinite(phi_[i])) {
            throw std::invalid_argument("bias profile: phi must be finite and >= 0");
        }
    }
}

BiasProfile BiasProfile::constant(int T, double gamma, double phi) {
    return BiasProfile(std::vector<double>(static_cast<std::size_t>(T), gamma),
                       std::vector<double>(static_cast<std::size_t>(T), phi));
}

BiasProfile BiasProfile::identity(int T) { return constant(T, 1.0, 0.0); }

double BiasProfile::gamma(int t) const {
    if (t < 1 || t > steps()) {
        throw std::out_of_range("bias profile: t out of range");
    }
    return gamma_[static_cast<std::size_t>(t - 1)];
}

double BiasProfile::phi(int t) const {
    if (t < 1 || t > steps()) {
        throw std::out_of_range("bias profile: t out of range");
    }
    return phi_[static_cast<std::size_t>(t - 1)];
}

double BiasProfile::max_phi() const {
    double m = 0.0;
    for (double p : phi_) {
        m = std::max(m, p);
    }
    return m;
}

bool BiasProfile::is_identity() const {
    for (std::size_t i = 0; i < gamma_.size(); ++i) {
        if (gamma_[i] != 1.0 || phi_[i] != 0.0) {
            return false;
        }
    }
    return true;
}

Grid x0_to_eps(const Grid& x, const Grid& x0_hat, int t, const NoiseSchedule& sched) {
    const double ab = sched.alpha_bar(t);
    if (ab >= 1.0) {
        throw std::invalid_argument("x0_to_eps: alpha_bar(t) = 1 has no eps-form");
    }
    return axpy(1.0 / std::sqrt(1.0 - ab), x, -std::sqrt(ab) / std::sqrt(1.0 - ab), x0_hat);
}

Grid eps_to_x0(const Grid& x, const Grid& eps_hat, int t, const NoiseSchedule& sched) {
    const double ab = sched.alpha_bar(t);
    return axpy(1.0 / std::sqrt(ab), x, -std::sqrt(1.0 - ab) / std::sqrt(ab), eps_hat);
}

Grid biased_x0(const Grid& inner_output, double gamma_t, double phi_t, const Grid& noise) {
    if (gamma_t == 1.0 && phi_t == 0.0) {
        return inner_output;  // identity profile is exact, not a rounding of it
    }
    return axpy(gamma_t, inner_output, phi_t, noise);
}

ExactDenoiser::ExactDenoiser(GaussianMixture gmm, NoiseSchedule sched)
    : gmm_(std::move(gmm)), sched_(std::move(sched)) {}

Grid ExactDenoiser::predict_x0(const Grid& x, int t, std::uint64_t, std::uint32_t) const {
    return gmm_.posterior_x0(x, t, sched_);
}

BiasedDenoiser::BiasedDenoiser(std::shared_ptr<const Denoiser> inner, BiasProfile profile)
    : inner_(std::move(inner)), profile_(std::move(profile)) {
    if (!inner_) {
        throw std::invalid_argument("biased denoiser: inner denoiser required");
    }
}

Grid BiasedDenoiser::predict_x0(const Grid& x, int t, std::uint64_t seed,
                                std::uint32_t chain) const {
    Grid inner_out = inner_->predict_x0(x, t, seed, chain);
    const double g = profile_.gamma(t);
    const double p = profile_.phi(t);
    if (g == 1.0 && p == 0.0) {
        return inner_out;
    }
    Grid noise(inner_out.shape());
    rng::NormalStream stream({seed, chain, static_cast<std::uint32_t>(t),
                              rng::Purpose::bias_noise});
    stream.fill(noise.values());
    return biased_x0(inner_out, g, p, noise);
}

AssumptionDenoiser::AssumptionDenoiser(GaussianMixture gmm, BiasProfile profile)
    : gmm_(std::move(gmm)), profile_(std::move(profile)) {}

Grid AssumptionDenoiser::chain_x0(std::uint64_t seed, std::uint32_t chain) const {
    return gmm_.sample(seed, chain);
}

Grid AssumptionDenoiser::predict_x0(const Grid& x, int t, std::uint64_t seed,
                                    std::uint32_t chain) const {
    if (!(x.shape() == gmm_.shape())) {
        throw std::invalid_argument("assumption denoiser: shape mismatch");
    }
    Grid x0 = chain_x0(seed, chain);
    const double g = profile_.gamma(t);
    const double p = profile_.phi(t);
    if (g == 1.0 && p == 0.0) {
        return x0;
    }
    Grid noise(x0.shape());
    rng::NormalStream stream({seed, chain, static_cast<std::uint32_t>(t),
                              rng::Purpose::bias_noise});
    stream.fill(noise.values());
    return biased_x0(x0, g, p, noise);
}

}  // namespace snrlab
