#include "snrlab/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "snrlab/sampler.hpp"
#include "snrlab/threading.hpp"

namespace snrlab::diag {

namespace {

// Mean/SE over chains from per-chain values laid out chain-major. Reduction
// runs in chain order regardless of how the values were produced.
Curve reduce_curve(const std::vector<int>& ts, const std::vector<double>& values, int n) {
    Curve c;
    c.t = ts;
    const std::size_t k = ts.size();
    c.mean.assign(k, 0.0);
    c.se.assign(k, 0.0);
    std::vector<double> sum(k, 0.0), sum_sq(k, 0.0);
    for (int i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double v = values[static_cast<std::size_t>(i) * k + j];
            sum[j] += v;
            sum_sq[j] += v * v;
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double m = sum[j] / n;
        c.mean[j] = m;
        if (n > 1) {
            const double var = (sum_sq[j] - sum[j] * m) / (n - 1);
            c.se[j] = std::sqrt(std::max(var, 0.0) / n);
        }
    }
    return c;
}

void check_steps(const std::vector<int>& list, const NoiseSchedule& sched, const char* what) {
    if (list.empty()) {
        throw std::invalid_argument(std::string("diagnostics: empty ") + what + " list");
    }
    for (int v : list) {
        if (v < 1 || v > sched.steps()) {
            throw std::invalid_argument(std::string("diagnostics: ") + what +
                                        " entry out of range");
        }
    }
}

}  // namespace

SlidingWindow sliding_window(const Denoiser& model, const NoiseSchedule& sched,
                             const GaussianMixture& data, std::vector<int> s_list,
                             std::vector<int> t_list, int n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("sliding_window: n must be >= 1");
    }
    check_steps(s_list, sched, "s");
    check_steps(t_list, sched, "t");
    const std::size_t ns = s_list.size(), nt = t_list.size();
    // per-chain cell values, chain-major, cells (s,t) flattened
    std::vector<double> cells(static_cast<std::size_t>(n) * ns * nt);
    parallel_for(n, [&](int i) {
        const auto chain = static_cast<std::uint32_t>(i);
        const Grid x0 = data.sample(seed, chain);
        Grid eps(x0.shape());
        for (std::size_t tj = 0; tj < nt; ++tj) {
            const int t = t_list[tj];
            rng::NormalStream es({seed, chain, static_cast<std::uint32_t>(t),
                                  rng::Purpose::forward_eps});
            es.fill(eps.values());
            const Grid x_t = forward_perturb(x0, t, eps, sched);
            for (std::size_t sj = 0; sj < ns; ++sj) {
                const int s = s_list[sj];
                const Grid x0_hat = model.predict_x0(x_t, s, seed, chain);
                const Grid eps_hat = x0_to_eps(x_t, x0_hat, s, sched);
                cells[(static_cast<std::size_t>(i) * ns + sj) * nt + tj] = eps_hat.mean_sq();
            }
        }
    });
    SlidingWindow out;
    out.s_list = std::move(s_list);
    out.t_list = std::move(t_list);
    out.n = n;
    out.mean.assign(ns, std::vector<double>(nt, 0.0));
    out.se.assign(ns, std::vector<double>(nt, 0.0));
    for (std::size_t sj = 0; sj < ns; ++sj) {
        std::vector<double> sum(nt, 0.0), sum_sq(nt, 0.0);
        for (int i = 0; i < n; ++i) {
            for (std::size_t tj = 0; tj < nt; ++tj) {
                const double v = cells[(static_cast<std::size_t>(i) * ns + sj) * nt + tj];
                sum[tj] += v;
                sum_sq[tj] += v * v;
            }
        }
        for (std::size_t tj = 0; tj < nt; ++tj) {
            const double m = sum[tj] / n;
            out.mean[sj][tj] = m;
            if (n > 1) {
                const double var = (sum_sq[tj] - sum[tj] * m) / (n - 1);
                out.se[sj][tj] = std::sqrt(std::max(var, 0.0) / n);
            }
        }
    }
    return out;
}

double sliding_window_cell_exact(int s, int t, double var0, const NoiseSchedule& sched) {
    const double ab_s = sched.alpha_bar(s);
    const double ab_t = sched.alpha_bar(t);
    const double v_s = ab_s * var0 + 1.0 - ab_s;
    return (1.0 - ab_s) * (ab_t * var0 + 1.0 - ab_t) / (v_s * v_s);
}

ForwardReverse forward_vs_reverse(const Denoiser& model, const NoiseSchedule& sched,
                                  const GaussianMixture& data, const CorrectionConfig& corr,
                                  int n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("forward_vs_reverse: n must be >= 1");
    }
    const int T = sched.steps();
    std::vector<int> ts(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
        ts[static_cast<std::size_t>(t - 1)] = t;
    }

    std::vector<double> fwd_vals(static_cast<std::size_t>(n) * static_cast<std::size_t>(T));
    parallel_for(n, [&](int i) {
        const auto chain = static_cast<std::uint32_t>(i);
        const Grid x0 = data.sample(seed, chain);
        Grid eps(x0.shape());
        for (int t = 1; t <= T; ++t) {
            rng::NormalStream es({seed, chain, static_cast<std::uint32_t>(t),
                                  rng::Purpose::forward_eps});
            es.fill(eps.values());
            const Grid x_t = forward_perturb(x0, t, eps, sched);
            const Grid x0_hat = model.predict_x0(x_t, t, seed, chain);
            const Grid eps_hat = x0_to_eps(x_t, x0_hat, t, sched);
            fwd_vals[static_cast<std::size_t>(i) * T + (t - 1)] = eps_hat.mean_sq();
        }
    });

    RunOptions opt;
    opt.n_chains = n;
    opt.seed = seed;
    const auto trajs = run_reverse(model, sched, corr, opt);
    std::vector<double> rev_vals(static_cast<std::size_t>(n) * static_cast<std::size_t>(T));
    for (int i = 0; i < n; ++i) {
        for (int t = 1; t <= T; ++t) {
            rev_vals[static_cast<std::size_t>(i) * T + (t - 1)] =
                trajs[static_cast<std::size_t>(i)].eps_hat_msq[static_cast<std::size_t>(t - 1)];
        }
    }

    return {reduce_curve(ts, fwd_vals, n), reduce_curve(ts, rev_vals, n)};
}

ReconNorms reconstruction_norms(const Denoiser& model, const NoiseSchedule& sched,
                                const GaussianMixture& data, int n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("reconstruction_norms: n must be >= 1");
    }
    const int T = sched.steps();
    std::vector<int> ts(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
        ts[static_cast<std::size_t>(t - 1)] = t;
    }

    std::vector<double> fwd_vals(static_cast<std::size_t>(n) * static_cast<std::size_t>(T));
    parallel_for(n, [&](int i) {
        const auto chain = static_cast<std::uint32_t>(i);
        const Grid x0 = data.sample(seed, chain);
        Grid eps(x0.shape());
        for (int t = 1; t <= T; ++t) {
            rng::NormalStream es({seed, chain, static_cast<std::uint32_t>(t),
                                  rng::Purpose::forward_eps});
            es.fill(eps.values());
            const Grid x_t = forward_perturb(x0, t, eps, sched);
            const Grid x0_hat = model.predict_x0(x_t, t, seed, chain);
            fwd_vals[static_cast<std::size_t>(i) * T + (t - 1)] = x0_hat.mean_sq();
        }
    });

    RunOptions opt;
    opt.n_chains = n;
    opt.seed = seed;
    CorrectionConfig none;
    const auto trajs = run_reverse(model, sched, none, opt);
    std::vector<double> rev_vals(static_cast<std::size_t>(n) * static_cast<std::size_t>(T));
    for (int i = 0; i < n; ++i) {
        for (int t = 1; t <= T; ++t) {
            rev_vals[static_cast<std::size_t>(i) * T + (t - 1)] =
                trajs[static_cast<std::size_t>(i)].x0_hat_msq[static_cast<std::size_t>(t - 1)];
        }
    }

    ReconNorms out{reduce_curve(ts, fwd_vals, n), reduce_curve(ts, rev_vals, n),
                   data.mean_sq_per_dim()};
    return out;
}

GammaPsiEstimate estimate_gamma_psi(const NoiseSchedule& sched, const GaussianMixture& data,
                                    const BiasProfile& profile, int t, int n,
                                    std::uint64_t seed, int n_batches) {
    if (data.modes().size() != 1) {
        throw std::invalid_argument("estimate_gamma_psi: data must be single-mode");
    }
    const double var0 = data.modes().front().var;
    if (!(var0 > 0.0)) {
        throw std::invalid_argument("estimate_gamma_psi: data variance must be positive");
    }
    if (n_batches < 2 || n < n_batches) {
        throw std::invalid_argument("estimate_gamma_psi: need n >= n_batches >= 2");
    }
    const int per_batch = n / n_batches;
    const int used = per_batch * n_batches;
    const double ab_prev = sched.alpha_bar(t - 1);
    const double sqrt_ab_prev = std::sqrt(ab_prev);
    const int dim = data.shape().size();

    // per-batch raw moments, pooled over coordinates after per-coordinate centering
    struct BatchMoments {
        std::vector<double> sum_x0, sum_xh, sum_x0x0, sum_xhxh, sum_x0xh;
    };
    std::vector<BatchMoments> batches(static_cast<std::size_t>(n_batches));
    for (auto& b : batches) {
        b.sum_x0.assign(static_cast<std::size_t>(dim), 0.0);
        b.sum_xh.assign(static_cast<std::size_t>(dim), 0.0);
        b.sum_x0x0.assign(static_cast<std::size_t>(dim), 0.0);
        b.sum_xhxh.assign(static_cast<std::size_t>(dim), 0.0);
        b.sum_x0xh.assign(static_cast<std::size_t>(dim), 0.0);
    }

    parallel_for(n_batches, [&](int bi) {
        auto& b = batches[static_cast<std::size_t>(bi)];
        const double g = profile.gamma(t);
        const double p = profile.phi(t);
        for (int j = 0; j < per_batch; ++j) {
            const auto chain = static_cast<std::uint32_t>(bi * per_batch + j);
            const Grid x0 = data.sample(seed, chain);
            Grid eps(x0.shape());
            rng::NormalStream es({seed, chain, static_cast<std::uint32_t>(t),
                                  rng::Purpose::forward_eps});
            es.fill(eps.values());
            const Grid x_t = forward_perturb(x0, t, eps, sched);

            Grid x0_pred = x0;
            if (!(g == 1.0 && p == 0.0)) {
                Grid xi(x0.shape());
                rng::NormalStream bs({seed, chain, static_cast<std::uint32_t>(t),
                                      rng::Purpose::bias_noise});
                bs.fill(xi.values());
                x0_pred = biased_x0(x0, g, p, xi);
            }

            Grid z(x0.shape());
            rng::NormalStream zs({seed, chain, static_cast<std::uint32_t>(t),
                                  rng::Purpose::step_noise});
            zs.fill(z.values());
            const Grid x_hat = posterior_step(x_t, x0_pred, &z, t, sched);

            for (int c = 0; c < dim; ++c) {
                const double a = x0[c];
                const double h = x_hat[c];
                b.sum_x0[static_cast<std::size_t>(c)] += a;
                b.sum_xh[static_cast<std::size_t>(c)] += h;
                b.sum_x0x0[static_cast<std::size_t>(c)] += a * a;
                b.sum_xhxh[static_cast<std::size_t>(c)] += h * h;
                b.sum_x0xh[static_cast<std::size_t>(c)] += a * h;
            }
        }
    });

    // batch-level estimates
    std::vector<double> gh(static_cast<std::size_t>(n_batches));
    std::vector<double> ns(static_cast<std::size_t>(n_batches));
    for (int bi = 0; bi < n_batches; ++bi) {
        const auto& b = batches[static_cast<std::size_t>(bi)];
        const double m = static_cast<double>(per_batch);
        double cov = 0.0, var_h = 0.0;
        for (int c = 0; c < dim; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            const double mean0 = b.sum_x0[ci] / m;
            const double meanh = b.sum_xh[ci] / m;
            cov += b.sum_x0xh[ci] / m - mean0 * meanh;
            var_h += b.sum_xhxh[ci] / m - meanh * meanh;
        }
        cov /= dim;
        var_h /= dim;
        const double g_est = cov / (var0 * sqrt_ab_prev);
        gh[static_cast<std::size_t>(bi)] = g_est;
        const double coef = g_est * sqrt_ab_prev;
        const double resid = var_h - coef * coef * var0;
        ns[static_cast<std::size_t>(bi)] = std::sqrt(std::max(resid, 0.0));
    }

    auto mean_se = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        const double m = s / static_cast<double>(v.size());
        double q = 0.0;
        for (double x : v) {
            q += (x - m) * (x - m);
        }
        const double se = std::sqrt(q / (static_cast<double>(v.size()) - 1.0) /
                                    static_cast<double>(v.size()));
        return std::pair<double, double>{m, se};
    };

    GammaPsiEstimate est;
    est.n = used;
    std::tie(est.gamma_hat, est.gamma_hat_se) = mean_se(gh);
    std::tie(est.noise_std, est.noise_std_se) = mean_se(ns);
    return est;
}

}  // namespace snrlab::diag
