#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <vector>

#include "snrlab/metrics.hpp"
#include "snrlab/rng.hpp"

using namespace snrlab;

namespace {

std::vector<Grid> gaussian_set(int n, double shift, std::uint64_t seed) {
    std::vector<Grid> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Grid g(GridShape{1, 2, 2}, shift);
        Grid noise(g.shape());
        rng::NormalStream s({seed, static_cast<std::uint32_t>(i), 0, rng::Purpose::data_x0});
        s.fill(noise.values());
        for (int j = 0; j < g.size(); ++j) {
            g[j] += noise[j];
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace

TEST_CASE("energy distance vanishes on identical sets") {
    const auto a = gaussian_set(200, 0.0, 1);
    CHECK(metrics::energy_distance(a, a) == 0.0);
}

TEST_CASE("energy distance grows with the mean shift") {
    const auto ref = gaussian_set(600, 0.0, 2);
    double prev = -1.0;
    for (double m : {0.0, 0.5, 1.0, 2.0}) {
        const auto shifted = gaussian_set(600, m, 3);
        const double d = metrics::energy_distance(shifted, ref);
        CHECK(d >= -1e-12);
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("energy distance is symmetric and order independent") {
    auto a = gaussian_set(300, 0.3, 4);
    const auto b = gaussian_set(300, 0.0, 5);
    const double ab = metrics::energy_distance(a, b);
    const double ba = metrics::energy_distance(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-10));

    std::reverse(a.begin(), a.end());
    CHECK(metrics::energy_distance(a, b) == doctest::Approx(ab).epsilon(1e-10));
}

TEST_CASE("energy distance batches power paired errors") {
    const auto a = gaussian_set(400, 0.2, 6);
    const auto b = gaussian_set(400, 0.0, 7);
    const auto batches = metrics::energy_distance_batches(a, b, 8);
    CHECK(batches.size() == 8);
    for (double v : batches) {
        CHECK(std::isfinite(v));
    }
    CHECK_THROWS_AS(metrics::energy_distance_batches(a, b, 1), std::invalid_argument);
}

TEST_CASE("1-D wasserstein matches the shift between unit gaussians") {
    std::vector<double> a, b;
    rng::NormalStream s({8, 0, 0, rng::Purpose::data_x0});
    const double m = 0.8;
    for (int i = 0; i < 40000; ++i) {
        a.push_back(s.next());
        b.push_back(s.next() + m);
    }
    CHECK(metrics::wasserstein1_1d(a, b) == doctest::Approx(m).epsilon(0.03));
    // identical samples
    CHECK(metrics::wasserstein1_1d(a, a) == 0.0);
    // unequal sizes still integrate correctly: all mass at two points
    CHECK(metrics::wasserstein1_1d({0.0, 0.0}, {1.0}) == doctest::Approx(1.0));
}

TEST_CASE("sliced wasserstein basics") {
    const auto a = gaussian_set(400, 0.0, 9);
    const auto b = gaussian_set(400, 0.7, 10);
    CHECK(metrics::sliced_wasserstein(a, a, 16, 123) == 0.0);
    const double d1 = metrics::sliced_wasserstein(a, b, 16, 123);
    const double d2 = metrics::sliced_wasserstein(b, a, 16, 123);
    CHECK(d1 > 0.0);
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-10));
    // seeded projections are reproducible
    CHECK(metrics::sliced_wasserstein(a, b, 16, 123) == d1);
}

TEST_CASE("both metrics rank a fresh data draw above a shifted draw") {
    const auto data = gaussian_set(500, 0.0, 11);
    const auto fresh = gaussian_set(500, 0.0, 12);
    const auto off = gaussian_set(500, 0.25, 13);
    CHECK(metrics::energy_distance(fresh, data) < metrics::energy_distance(off, data));
    CHECK(metrics::sliced_wasserstein(fresh, data, 32, 5) <
          metrics::sliced_wasserstein(off, data, 32, 5));
}

TEST_CASE("metric input validation") {
    const auto a = gaussian_set(10, 0.0, 14);
    std::vector<Grid> empty;
    CHECK_THROWS_AS(metrics::energy_distance(a, empty), std::invalid_argument);
    CHECK_THROWS_AS(metrics::sliced_wasserstein(a, empty, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(metrics::sliced_wasserstein(a, a, 0, 0), std::invalid_argument);
}
