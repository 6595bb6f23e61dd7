#include "popinfo/random.hpp"

#include <cmath>
#include <limits>

namespace popinfo {

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k)
{
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}
}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter counter, Key key)
{
    counter = round(counter, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        counter = round(counter, key);
    }
    return counter;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return mix64(mix64(mix64(seed) ^ a) ^ (b + 0x632BE59BD9B4E019ull));
}

Substream::Substream(std::uint64_t seed, StreamLane lane, std::uint64_t index, std::uint32_t sub)
{
    const std::uint64_t k = mix64(seed ^ (static_cast<std::uint64_t>(lane) << 56));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    counter_ = {0u, sub, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
}

void Substream::refill()
{
    buffer_ = Philox4x32::generate(counter_, key_);
    ++counter_[0];
    pos_ = 0;
}

std::uint32_t Substream::next_u32()
{
    if (pos_ == 4) {
        refill();
    }
    return buffer_[pos_++];
}

std::uint64_t Substream::next_u64()
{
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double Substream::uniform()
{
    constexpr double kScale = 0x1.0p-53;
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kScale;
}

std::uint32_t Substream::uniform_index(std::uint32_t bound)
{
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
        const std::uint32_t threshold = (0u - bound) % bound;
        while (low < threshold) {
            m = static_cast<std::uint64_t>(next_u32()) * bound;
            low = static_cast<std::uint32_t>(m);
        }
    }
    return static_cast<std::uint32_t>(m >> 32);
}

namespace {

std::uint32_t poisson_inversion(double mean, Substream& stream)
{
    const double u = stream.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint32_t k = 0;
    // The cap only triggers when rounding keeps cdf below u at the far tail.
    while (u > cdf && k < 1000) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

std::uint32_t poisson_ptrs(double mean, Substream& stream)
{
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = stream.uniform() - 0.5;
        const double v = stream.uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::uint32_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b)
            <= -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint32_t>(k);
        }
    }
}

}  // namespace

std::uint32_t sample_poisson(double mean, Substream& stream)
{
    if (mean <= 0.0) {
        return 0;
    }
    return mean < 10.0 ? poisson_inversion(mean, stream) : poisson_ptrs(mean, stream);
}

}  // namespace popinfo
