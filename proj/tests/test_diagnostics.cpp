#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "snrlab/diagnostics.hpp"
#include "snrlab/metrics.hpp"
#include "snrlab/sampler.hpp"
#include "snrlab/theory.hpp"

using namespace snrlab;

namespace {

GaussianMixture single_mode(GridShape shape, double mean, double var) {
    return GaussianMixture({GmmMode{1.0, Grid(shape, mean), var}});
}

}  // namespace

TEST_CASE("sliding window matches the conjugate closed form") {
    const GridShape shape{1, 8, 8};
    const auto sched = NoiseSchedule::desk_default(100);
    const double var0 = 0.25;
    const auto data = single_mode(shape, 0.0, var0);
    ExactDenoiser model(data, sched);
    const int s = 50;
    const std::vector<int> t_list{5, 25, 50, 75, 100};
    const auto sw = diag::sliding_window(model, sched, data, {s}, t_list, 4000, 2026);

    double prev = -1.0;
    for (std::size_t j = 0; j < t_list.size(); ++j) {
        const double oracle = diag::sliding_window_cell_exact(s, t_list[j], var0, sched);
        CHECK(oracle > prev);  // strictly increasing in t for var0 < 1
        prev = oracle;
        CHECK(std::abs(sw.mean[0][j] - oracle) <= 3.0 * sw.se[0][j]);
    }

    // the matched cell t = s equals (1-ab_s)/(ab_s var0 + 1-ab_s)
    const double ab = sched.alpha_bar(s);
    const double matched = (1.0 - ab) / (ab * var0 + 1.0 - ab);
    CHECK(diag::sliding_window_cell_exact(s, s, var0, sched) ==
          doctest::Approx(matched).epsilon(1e-14));
}

TEST_CASE("unit-variance data flattens the sliding window row") {
    const auto sched = NoiseSchedule::desk_default(100);
    for (int t : {1, 30, 60, 100}) {
        const double cell = diag::sliding_window_cell_exact(50, t, 1.0, sched);
        const double at_s = diag::sliding_window_cell_exact(50, 50, 1.0, sched);
        CHECK(cell == doctest::Approx(at_s).epsilon(1e-12));
    }
}

TEST_CASE("sliding window rejects bad arguments") {
    const GridShape shape{1, 4, 4};
    const auto sched = NoiseSchedule::desk_default(10);
    const auto data = single_mode(shape, 0.0, 1.0);
    ExactDenoiser model(data, sched);
    CHECK_THROWS_AS(diag::sliding_window(model, sched, data, {}, {1}, 10, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(diag::sliding_window(model, sched, data, {1}, {0}, 10, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(diag::sliding_window(model, sched, data, {11}, {1}, 10, 0),
                    std::invalid_argument);
}

namespace {

// 19 equal steps holding alpha_bar above 1/2, then one near-1 step down to
// pure noise: every interior timestep keeps a macroscopic signal level, so a
// small reconstruction bias is resolvable there.
NoiseSchedule signal_holding_schedule() {
    std::vector<double> betas(20, 1.0 - std::pow(0.5, 1.0 / 19.0));
    betas.back() = 0.9998;
    return NoiseSchedule::from_betas(std::move(betas), SigmaMode::small);
}

}  // namespace

TEST_CASE("forward and reverse curves coincide for the ideal reconstruction") {
    const GridShape shape{1, 16, 16};
    const auto sched = signal_holding_schedule();
    const auto data = single_mode(shape, 0.0, 1.0);
    AssumptionDenoiser model(data, BiasProfile::identity(20));
    CorrectionConfig none;
    const auto fr = diag::forward_vs_reverse(model, sched, data, none, 4000, 7);
    for (std::size_t i = 0; i < fr.forward.t.size(); ++i) {
        const double gap = fr.reverse.mean[i] - fr.forward.mean[i];
        const double se = std::hypot(fr.forward.se[i], fr.reverse.se[i]);
        CHECK(std::abs(gap) <= 3.5 * se);
    }
}

TEST_CASE("bias makes the reverse curve dominate") {
    const GridShape shape{1, 16, 16};
    const auto sched = signal_holding_schedule();
    const auto data = single_mode(shape, 0.0, 1.0);
    AssumptionDenoiser model(data, BiasProfile::constant(20, 0.98, 0.1));
    CorrectionConfig none;
    const auto fr = diag::forward_vs_reverse(model, sched, data, none, 2000, 16);
    int dominated = 0;
    for (std::size_t i = 0; i < fr.forward.t.size(); ++i) {
        if (fr.reverse.mean[i] >= fr.forward.mean[i]) {
            ++dominated;
        }
    }
    CHECK(dominated >= 19);  // the final pure-noise step is a fair coin
}

TEST_CASE("dominance ordering is robust to seed and batch size") {
    const GridShape shape{1, 16, 16};
    const auto sched = signal_holding_schedule();
    const auto data = single_mode(shape, 0.0, 1.0);
    AssumptionDenoiser model(data, BiasProfile::constant(20, 0.98, 0.1));
    CorrectionConfig none;
    // precision-weighted curve gap: tiny batches are noise-limited, so the
    // ordering is asserted per seed at n >= 1000 and in aggregate below that
    auto weighted_gap = [](const diag::ForwardReverse& fr) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < fr.forward.t.size(); ++i) {
            const double se2 = fr.forward.se[i] * fr.forward.se[i] +
                               fr.reverse.se[i] * fr.reverse.se[i];
            num += (fr.reverse.mean[i] - fr.forward.mean[i]) / se2;
            den += 1.0 / se2;
        }
        return num / den;
    };
    for (int n : {10, 100, 1000, 2000}) {
        double pooled = 0.0;
        int positive = 0;
        for (std::uint64_t seed : {16ULL, 42ULL, 99ULL}) {
            const auto fr = diag::forward_vs_reverse(model, sched, data, none, n, seed);
            const double g = weighted_gap(fr);
            pooled += g;
            positive += g > 0.0 ? 1 : 0;
            if (n >= 1000) {
                CHECK(g > 0.0);
                int dominated = 0;
                for (std::size_t i = 0; i < fr.forward.t.size(); ++i) {
                    if (fr.reverse.mean[i] >= fr.forward.mean[i]) {
                        ++dominated;
                    }
                }
                CHECK(dominated >= 18);
            }
        }
        CHECK(pooled > 0.0);
        CHECK(positive >= 2);
    }
}

TEST_CASE("a fresh data draw scores better than a biased chain on both metrics") {
    const GridShape shape{1, 8, 8};
    const auto sched = NoiseSchedule::linear(40, 0.005, 0.5, SigmaMode::small);
    const auto data = single_mode(shape, 0.0, 0.25);
    auto exact = std::make_shared<ExactDenoiser>(data, sched);
    BiasedDenoiser biased(exact, BiasProfile::constant(40, 0.98, 0.1));
    CorrectionConfig none;
    const auto trajs = run_reverse(biased, sched, none, {600, 3, {}});
    std::vector<Grid> chain_out;
    for (const auto& tr : trajs) {
        chain_out.push_back(tr.terminal);
    }
    std::vector<Grid> ref, fresh;
    for (int i = 0; i < 600; ++i) {
        ref.push_back(data.sample(100, static_cast<std::uint32_t>(i)));
        fresh.push_back(data.sample(200, static_cast<std::uint32_t>(i)));
    }
    CHECK(metrics::energy_distance(fresh, ref) < metrics::energy_distance(chain_out, ref));
    CHECK(metrics::sliced_wasserstein(fresh, ref, 32, 9) <
          metrics::sliced_wasserstein(chain_out, ref, 32, 9));
}

TEST_CASE("reconstruction norms stay below the data norm") {
    const GridShape shape{1, 8, 8};
    const auto sched = NoiseSchedule::desk_default(50);
    Grid mean(shape);
    for (int i = 0; i < mean.size(); ++i) {
        mean[i] = (i % 2 == 0) ? 0.5 : -0.5;
    }
    GaussianMixture data({GmmMode{1.0, mean, 0.25}});
    ExactDenoiser model(data, sched);
    const auto rn = diag::reconstruction_norms(model, sched, data, 2000, 9);
    for (std::size_t i = 0; i < rn.forward.t.size(); ++i) {
        CHECK(rn.forward.mean[i] <= rn.data_msq + 3.0 * rn.forward.se[i]);
        CHECK(rn.reverse.mean[i] <= rn.data_msq + 3.0 * rn.reverse.se[i]);
    }

    // closed form for zero-mean unit grids: ab var0^2 / (ab var0 + 1 - ab)
    const auto zdata = single_mode(shape, 0.0, 1.0);
    ExactDenoiser zmodel(zdata, sched);
    const auto zr = diag::reconstruction_norms(zmodel, sched, zdata, 4000, 10);
    for (std::size_t i = 0; i < zr.forward.t.size(); i += 7) {
        const double ab = sched.alpha_bar(zr.forward.t[i]);
        const double oracle = ab * 1.0 / (ab * 1.0 + 1.0 - ab);
        CHECK(std::abs(zr.forward.mean[i] - oracle) <= 3.5 * zr.forward.se[i]);
    }
}

TEST_CASE("near point-mass data reconstructs its mean") {
    const GridShape shape{1, 4, 4};
    const auto sched = NoiseSchedule::desk_default(20);
    const auto data = single_mode(shape, 0.7, 1e-6);
    ExactDenoiser model(data, sched);
    const auto rn = diag::reconstruction_norms(model, sched, data, 500, 11);
    for (std::size_t i = 0; i < rn.forward.t.size(); i += 5) {
        CHECK(rn.forward.mean[i] == doctest::Approx(0.49).epsilon(1e-3));
    }
}

TEST_CASE("shrunken feedback chains reconstruct below the forward curve") {
    const GridShape shape{1, 8, 8};
    const auto sched = NoiseSchedule::desk_default(50, SigmaMode::small);
    const auto data = single_mode(shape, 0.0, 0.25);
    auto exact = std::make_shared<ExactDenoiser>(data, sched);
    BiasedDenoiser model(exact, BiasProfile::constant(50, 0.9, 0.0));
    const auto rn = diag::reconstruction_norms(model, sched, data, 3000, 12);
    for (std::size_t i = 0; i < rn.forward.t.size(); ++i) {
        const double se = std::hypot(rn.forward.se[i], rn.reverse.se[i]);
        // tiny-magnitude cells at the noisiest timesteps sit at the resolution
        // limit; allow a hair of relative slack there
        CHECK(rn.reverse.mean[i] <= rn.forward.mean[i] * 1.01 + 3.0 * se);
    }
}

TEST_CASE("teacher-forced moment matching recovers the step law") {
    const GridShape shape{1, 8, 8};
    const auto sched = NoiseSchedule::desk_default(100);
    Grid mean(shape);
    for (int i = 0; i < mean.size(); ++i) {
        mean[i] = (i % 2 == 0) ? 0.5 : -0.5;
    }
    GaussianMixture data({GmmMode{1.0, mean, 0.25}});
    const int t = 50;

    // identity profile: unbiased coefficients
    const auto ident = diag::estimate_gamma_psi(sched, data, BiasProfile::identity(100), t,
                                                20000, 13);
    CHECK(std::abs(ident.gamma_hat - 1.0) <= 3.0 * ident.gamma_hat_se);
    const double abp = sched.alpha_bar(t - 1);
    CHECK(std::abs(ident.noise_std - std::sqrt(1.0 - abp)) <= 3.0 * ident.noise_std_se);

    // biased profile matches the analytic law
    const auto profile = BiasProfile::constant(100, 0.98, 0.1);
    const auto est = diag::estimate_gamma_psi(sched, data, profile, t, 20000, 13);
    const auto law = theory::biased_step_law(0.98, 0.1, t, sched);
    CHECK(std::abs(est.gamma_hat * std::sqrt(abp) - law.coef_x0) <=
          3.0 * est.gamma_hat_se * std::sqrt(abp));
    CHECK(std::abs(est.noise_std - law.noise_std) <= 3.0 * est.noise_std_se);

    // the covariance estimator centers the mean out
    GaussianMixture shifted({GmmMode{1.0, Grid(shape, 2.0), 0.25}});
    const auto est2 = diag::estimate_gamma_psi(sched, shifted, profile, t, 20000, 13);
    CHECK(std::abs(est2.gamma_hat - est.gamma_hat) <=
          3.0 * std::hypot(est.gamma_hat_se, est2.gamma_hat_se));
}

TEST_CASE("estimate_gamma_psi validates its data") {
    const GridShape shape{1, 4, 4};
    const auto sched = NoiseSchedule::desk_default(10);
    GaussianMixture two({GmmMode{0.5, Grid(shape, 1.0), 0.25},
                         GmmMode{0.5, Grid(shape, -1.0), 0.25}});
    CHECK_THROWS_AS(
        diag::estimate_gamma_psi(sched, two, BiasProfile::identity(10), 5, 100, 0),
        std::invalid_argument);
}
