#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "snrlab/schedule.hpp"

using namespace snrlab;

TEST_CASE("linear schedule single step") {
    const auto s = NoiseSchedule::linear(1, 0.5, 0.5);
    CHECK(s.beta(1) == 0.5);
    CHECK(s.alpha_bar(1) == 0.5);
    CHECK(s.alpha_bar(0) == 1.0);
    CHECK(s.snr(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.beta_tilde(1) == 0.0);
}

TEST_CASE("canonical 1000-step terminal product matches a long-double oracle") {
    const auto s = NoiseSchedule::linear(1000, 1e-4, 0.02);
    long double prod = 1.0L;
    for (int t = 1; t <= 1000; ++t) {
        const long double beta =
            1e-4L + (0.02L - 1e-4L) * static_cast<long double>(t - 1) / 999.0L;
        prod *= (1.0L - beta);
    }
    CHECK(s.alpha_bar(1000) ==
          doctest::Approx(static_cast<double>(prod)).epsilon(1e-10));
    for (int t = 1; t <= 1000; ++t) {
        CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
    }
}

TEST_CASE("schedule rejects invalid parameters") {
    CHECK_THROWS_AS(NoiseSchedule::linear(0, 0.1, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::linear(10, 0.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::linear(10, 0.3, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::linear(10, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::cosine(0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::cosine(10, -1.0), std::invalid_argument);
    const auto s = NoiseSchedule::desk_default();
    CHECK_THROWS_AS(s.beta(0), std::out_of_range);
    CHECK_THROWS_AS(s.beta(101), std::out_of_range);
    CHECK_THROWS_AS(s.alpha_bar(-1), std::out_of_range);
}

TEST_CASE("cosine schedule matches its closed form where unclipped") {
    const int T = 100;
    const double off = 0.008;
    const auto s = NoiseSchedule::cosine(T, off);
    auto f = [&](double t) {
        const double z = (t / T + off) / (1.0 + off) * std::numbers::pi / 2.0;
        return std::cos(z) * std::cos(z);
    };
    // until the clip engages, the beta products telescope back to f(t)/f(0)
    bool clipped = false;
    for (int t = 1; t <= T; ++t) {
        CHECK(s.beta(t) > 0.0);
        CHECK(s.beta(t) <= 0.999);
        const double unclipped = 1.0 - (f(t) / f(0)) / (f(t - 1) / f(0));
        clipped = clipped || unclipped > 0.999;
        if (!clipped) {
            CHECK(s.alpha_bar(t) == doctest::Approx(f(t) / f(0)).epsilon(1e-12));
        }
    }
    CHECK(clipped);  // the final steps of this setting do exercise the clip
    CHECK(s.alpha_bar(0) == 1.0);
}

TEST_CASE("snr arithmetic on one-step schedules") {
    CHECK(NoiseSchedule::linear(1, 0.5, 0.5).snr(1) == doctest::Approx(1.0));
    CHECK(NoiseSchedule::linear(1, 0.2, 0.2).snr(1) == doctest::Approx(4.0));
}

TEST_CASE("sigma modes") {
    const auto small = NoiseSchedule::desk_default(100, SigmaMode::small);
    const auto large = NoiseSchedule::desk_default(100, SigmaMode::large);
    CHECK(small.sigma(1) == 0.0);
    CHECK(large.sigma(1) == doctest::Approx(std::sqrt(large.beta(1))).epsilon(1e-15));
    for (int t = 1; t <= 100; ++t) {
        CHECK(small.sigma2(t) <= large.sigma2(t));
    }
}

TEST_CASE("schedule invariants") {
    for (const auto& s : {NoiseSchedule::desk_default(100), NoiseSchedule::cosine(64),
                          NoiseSchedule::linear(10, 0.05, 0.6)}) {
        for (int t = 1; t <= s.steps(); ++t) {
            const double prod = s.alpha_bar(t - 1) * s.alpha(t);
            CHECK(std::abs(s.alpha_bar(t) - prod) <= 1e-12 * std::abs(prod));
            CHECK(s.beta_tilde(t) <= s.beta(t) * (1.0 + 1e-15));
            CHECK(std::abs(s.snr(t) * (1.0 - s.alpha_bar(t)) - s.alpha_bar(t)) <=
                  1e-12 * s.alpha_bar(t));
            if (t > 1) {
                CHECK(s.snr(t) < s.snr(t - 1));
            }
        }
    }
}

TEST_CASE("desk default preserves the canonical terminal alpha_bar scale") {
    const auto desk = NoiseSchedule::desk_default(100);
    const auto canonical = NoiseSchedule::linear(1000, 1e-4, 0.02);
    // same order of magnitude terminal signal level (pure-noise start condition)
    CHECK(desk.alpha_bar(100) < 1e-4);
    CHECK(desk.alpha_bar(100) > canonical.alpha_bar(1000) / 10.0);
}
