#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace snrlab::rng {

// Philox4x32-10 counter-based generator. Every random draw in the lab is
// addressed by an explicit stream key, so results do not depend on thread
// scheduling or evaluation order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// What a stream is used for. Separate purposes get disjoint streams even when
// (seed, chain, t) coincide, so e.g. injected prediction noise is independent
// of the forward noise by construction.
enum class Purpose : std::uint32_t {
    chain_init = 0,
    step_noise = 1,
    bias_noise = 2,
    data_x0 = 3,
    forward_eps = 4,
    mode_pick = 5,
    projection = 6,
};

struct StreamKey {
    std::uint64_t seed = 0;
    std::uint32_t chain = 0;
    std::uint32_t t = 0;
    Purpose purpose = Purpose::chain_init;
};

// Deterministic stream of standard normal variates for one key.
// Counter layout: [block, chain, t ^ purpose-tagged words]; one stream yields
// up to 2^33 values, far beyond any single grid fill.
class NormalStream {
  public:
    explicit NormalStream(const StreamKey& key);

    double next();
    void fill(std::span<double> out);

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint32_t chain_ = 0;
    std::uint32_t tag_ = 0;  // t and purpose packed
    std::uint32_t t_ = 0;
    std::uint32_t block_ = 0;
    double cache_[2] = {0.0, 0.0};
    int cached_ = 0;
};

// Single uniform in (0,1) for one key. Uses the same addressing as block 0 of
// NormalStream, so a purpose must not be shared between the two kinds of draw
// for one (seed, chain, t); mode_pick is reserved for uniforms.
double uniform_unit(const StreamKey& key);

}  // namespace snrlab::rng
