#include "snrlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace snrlab::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c, std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
}

// ((x >> 11) + 1/2) * 2^-53: strictly inside (0,1), safe for log().
inline double to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

inline std::array<std::uint32_t, 4> make_counter(std::uint32_t block, std::uint32_t chain,
                                                 std::uint32_t t, Purpose purpose) {
    return {block, chain, t, static_cast<std::uint32_t>(purpose)};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        round_once(counter, key);
    }
    return counter;
}

NormalStream::NormalStream(const StreamKey& key)
    : key_{static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)},
      chain_(key.chain),
      tag_(static_cast<std::uint32_t>(key.purpose)),
      t_(key.t) {}

void NormalStream::refill() {
    const auto words = philox4x32(make_counter(block_, chain_, t_, static_cast<Purpose>(tag_)), key_);
    ++block_;
    const std::uint64_t a = (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
    const std::uint64_t b = (static_cast<std::uint64_t>(words[3]) << 32) | words[2];
    const double u1 = to_unit(a);
    const double u2 = to_unit(b);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cache_[0] = r * std::cos(theta);
    cache_[1] = r * std::sin(theta);
    cached_ = 2;
}

double NormalStream::next() {
    if (cached_ == 0) {
        refill();
    }
    return cache_[--cached_];
}

void NormalStream::fill(std::span<double> out) {
    for (double& v : out) {
        v = next();
    }
}

double uniform_unit(const StreamKey& key) {
    const std::array<std::uint32_t, 2> k = {
        static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)};
    const auto words = philox4x32(make_counter(0, key.chain, key.t, key.purpose), k);
    const std::uint64_t a = (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
    return to_unit(a);
}

}  // namespace snrlab::rng
