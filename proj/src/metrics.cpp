#include "snrlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snrlab/rng.hpp"
#include "snrlab/threading.hpp"

namespace snrlab::metrics {

namespace {

double pair_dist(const Grid& x, const Grid& y) {
    double s = 0.0;
    const int n = x.size();
    const double* px = x.data();
    const double* py = y.data();
    for (int i = 0; i < n; ++i) {
        const double d = px[i] - py[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// mean over all |a| x |b| pairs; parallel over rows, reduced in row order
double mean_cross_dist(std::span<const Grid> a, std::span<const Grid> b) {
    std::vector<double> row_sums(a.size(), 0.0);
    parallel_for(static_cast<int>(a.size()), [&](int i) {
        double s = 0.0;
        for (const Grid& g : b) {
            s += pair_dist(a[static_cast<std::size_t>(i)], g);
        }
        row_sums[static_cast<std::size_t>(i)] = s;
    });
    double total = 0.0;
    for (double s : row_sums) {
        total += s;
    }
    return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

void check_sets(std::span<const Grid> a, std::span<const Grid> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("metrics: sample sets must be non-empty");
    }
    if (!(a.front().shape() == b.front().shape())) {
        throw std::invalid_argument("metrics: sample sets must share one shape");
    }
}

}  // namespace

double energy_distance(std::span<const Grid> a, std::span<const Grid> b) {
    check_sets(a, b);
    const double eab = mean_cross_dist(a, b);
    const double eaa = mean_cross_dist(a, a);
    const double ebb = mean_cross_dist(b, b);
    return 2.0 * eab - eaa - ebb;
}

std::vector<double> energy_distance_batches(std::span<const Grid> a, std::span<const Grid> b,
                                            int n_batches) {
    check_sets(a, b);
    if (n_batches < 2) {
        throw std::invalid_argument("metrics: need at least 2 batches");
    }
    const std::size_t ba = a.size() / static_cast<std::size_t>(n_batches);
    const std::size_t bb = b.size() / static_cast<std::size_t>(n_batches);
    if (ba == 0 || bb == 0) {
        throw std::invalid_argument("metrics: too many batches for the sample count");
    }
    std::vector<double> out(static_cast<std::size_t>(n_batches));
    for (int k = 0; k < n_batches; ++k) {
        const auto sa = a.subspan(static_cast<std::size_t>(k) * ba, ba);
        const auto sb = b.subspan(static_cast<std::size_t>(k) * bb, bb);
        out[static_cast<std::size_t>(k)] = energy_distance(sa, sb);
    }
    return out;
}

double wasserstein1_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("metrics: empty 1-D sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // integrate |F_a^{-1} - F_b^{-1}| over quantile mass, exact for step functions
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double q = 0.0, total = 0.0;
    while (i < a.size() && j < b.size()) {
        const double qa = static_cast<double>(i + 1) / na;
        const double qb = static_cast<double>(j + 1) / nb;
        const double qn = std::min(qa, qb);
        total += (qn - q) * std::abs(a[i] - b[j]);
        q = qn;
        if (qa <= qn) {
            ++i;
        }
        if (qb <= qn) {
            ++j;
        }
    }
    return total;
}

double sliced_wasserstein(std::span<const Grid> a, std::span<const Grid> b, int n_proj,
                          std::uint64_t seed) {
    check_sets(a, b);
    if (n_proj < 1) {
        throw std::invalid_argument("metrics: n_proj must be >= 1");
    }
    const int dim = a.front().size();
    std::vector<double> per_proj(static_cast<std::size_t>(n_proj), 0.0);
    parallel_for(n_proj, [&](int p) {
        std::vector<double> dir(static_cast<std::size_t>(dim));
        rng::NormalStream stream(
            {seed, static_cast<std::uint32_t>(p), 0, rng::Purpose::projection});
        double norm2 = 0.0;
        for (double& v : dir) {
            v = stream.next();
            norm2 += v * v;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        auto project = [&](std::span<const Grid> set) {
            std::vector<double> out;
            out.reserve(set.size());
            for (const Grid& g : set) {
                double s = 0.0;
                for (int i = 0; i < dim; ++i) {
                    s += dir[static_cast<std::size_t>(i)] * g[i];
                }
                out.push_back(s * inv);
            }
            return out;
        };
        per_proj[static_cast<std::size_t>(p)] = wasserstein1_1d(project(a), project(b));
    });
    double total = 0.0;
    for (double v : per_proj) {
        total += v;
    }
    return total / static_cast<double>(n_proj);
}

}  // namespace snrlab::metrics
