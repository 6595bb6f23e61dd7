#pragma once

#include <array>
#include <cstdint>

namespace popinfo {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
/// Maps a 128-bit counter and 64-bit key to 128 random bits; stateless.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key);
};

/// Independent purposes draw from disjoint key spaces.
enum class StreamLane : std::uint32_t {
    Stimulus = 1,
    Response = 2,
    Bootstrap = 3,
    Population = 4,
    Test = 99,
};

/// SplitMix64 finalizer; used to derive keys and child seeds.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for a named sub-computation (e.g. one N of a sweep).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// A random stream addressed by (seed, lane, index, sub). Two substreams with
/// different addresses never share a Philox block, so draws do not depend on
/// the order in which substreams are consumed.
class Substream {
public:
    Substream(std::uint64_t seed, StreamLane lane, std::uint64_t index, std::uint32_t sub = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform();

    /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
    std::uint32_t uniform_index(std::uint32_t bound);

private:
    void refill();

    Philox4x32::Key key_{};
    Philox4x32::Counter counter_{};
    Philox4x32::Counter buffer_{};
    unsigned pos_ = 4;
};

/// Poisson variate with the given mean. Sequential-search inversion below 10,
/// Hormann's PTRS transformed rejection at and above 10. mean == 0 returns 0.
std::uint32_t sample_poisson(double mean, Substream& stream);

}  // namespace popinfo
