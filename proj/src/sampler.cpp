#include "snrlab/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "snrlab/threading.hpp"

namespace snrlab {

Grid forward_perturb(const Grid& x0, int t, const Grid& eps, const NoiseSchedule& sched) {
    const double ab = sched.alpha_bar(t);
    return axpy(std::sqrt(ab), x0, std::sqrt(1.0 - ab), eps);
}

Grid ancestral_step(const Grid& x_t, const Grid& eps_hat, const Grid* z, int t,
                    const NoiseSchedule& sched) {
    if (t < 1) {
        throw std::invalid_argument("ancestral_step: t must be >= 1");
    }
    const double a = sched.alpha(t);
    const double ab = sched.alpha_bar(t);
    const double inv_sa = 1.0 / std::sqrt(a);
    Grid out = axpy(inv_sa, x_t, -inv_sa * (1.0 - a) / std::sqrt(1.0 - ab), eps_hat);
    if (z != nullptr && t > 1) {
        axpy_into(out, sched.sigma(t), *z);
    }
    return out;
}

Grid posterior_step(const Grid& x_t, const Grid& x0_hat, const Grid* z, int t,
                    const NoiseSchedule& sched) {
    if (t < 1) {
        throw std::invalid_argument("posterior_step: t must be >= 1");
    }
    const double ab = sched.alpha_bar(t);
    const double ab_prev = sched.alpha_bar(t - 1);
    const double coef_x0 = std::sqrt(ab_prev) * sched.beta(t) / (1.0 - ab);
    const double coef_xt = std::sqrt(sched.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab);
    Grid out = axpy(coef_x0, x0_hat, coef_xt, x_t);
    if (z != nullptr && t > 1) {
        axpy_into(out, sched.sigma(t), *z);
    }
    return out;
}

Grid ddim_step(const Grid& x_t, const Grid& eps_hat, int t, int t_prev,
               const NoiseSchedule& sched) {
    if (t_prev >= t) {
        throw std::invalid_argument("ddim_step: t_prev must be below t");
    }
    if (t_prev < 0) {
        throw std::invalid_argument("ddim_step: t_prev must be >= 0");
    }
    const Grid x0_hat = eps_to_x0(x_t, eps_hat, t, sched);
    const double ab_prev = sched.alpha_bar(t_prev);
    return axpy(std::sqrt(ab_prev), x0_hat, std::sqrt(1.0 - ab_prev), eps_hat);
}

namespace {

Trajectory run_one_chain(const Denoiser& model, const NoiseSchedule& sched,
                         const CorrectionConfig& corr, std::uint64_t seed,
                         std::uint32_t chain, const RecordFlags& record) {
    const int T = sched.steps();
    const GridShape shape = model.shape();
    Trajectory traj;
    traj.chain_id = chain;
    traj.seed = seed;
    traj.state_msq.resize(static_cast<std::size_t>(T));
    traj.eps_hat_msq.resize(static_cast<std::size_t>(T));
    traj.x0_hat_msq.resize(static_cast<std::size_t>(T));

    Grid x(shape);
    rng::NormalStream init({seed, chain, 0, rng::Purpose::chain_init});
    init.fill(x.values());

    for (int t = T; t >= 1; --t) {
        const std::size_t ti = static_cast<std::size_t>(t - 1);
        traj.state_msq[ti] = x.mean_sq();
        if (record.states) {
            traj.states.push_back(x);
        }

        Grid x0_hat = model.predict_x0(x, t, seed, chain);
        traj.x0_hat_msq[ti] = x0_hat.mean_sq();
        {
            const Grid eps_hat = x0_to_eps(x, x0_hat, t, sched);
            traj.eps_hat_msq[ti] = eps_hat.mean_sq();
            if (record.eps_hat) {
                traj.eps_hats.push_back(eps_hat);
            }
        }
        if (record.x0_hat) {
            traj.x0_hats.push_back(x0_hat);
        }

        Grid next;
        if (t > 1) {
            Grid z(shape);
            rng::NormalStream zs({seed, chain, static_cast<std::uint32_t>(t),
                                  rng::Purpose::step_noise});
            zs.fill(z.values());
            next = posterior_step(x, x0_hat, &z, t, sched);
        } else {
            next = posterior_step(x, x0_hat, nullptr, t, sched);
        }
        next = apply_correction(corr, next, x0_hat, t, sched);
        x = std::move(next);
    }
    traj.terminal = std::move(x);
    return traj;
}

}  // namespace

std::vector<Trajectory> run_reverse(const Denoiser& model, const NoiseSchedule& sched,
                                    const CorrectionConfig& corr, const RunOptions& opt) {
    if (opt.n_chains < 1) {
        throw std::invalid_argument("run_reverse: n_chains must be >= 1");
    }
    corr.validate();
    std::vector<Trajectory> out(static_cast<std::size_t>(opt.n_chains));
    parallel_for(opt.n_chains, [&](int i) {
        out[static_cast<std::size_t>(i)] = run_one_chain(
            model, sched, corr, opt.seed, static_cast<std::uint32_t>(i), opt.record);
    });
    return out;
}

}  // namespace snrlab
