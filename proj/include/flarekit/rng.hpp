#pragma once

#include <cstdint>
#include <random>

namespace flarekit {

/// SplitMix64 finalizer: a bijective 64-bit mixing function.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent sub-streams of one pair seed.
enum class Stream : std::uint64_t {
    Params = 1,
    Noise = 2,
    Selection = 3,
    Placement = 4,
};

/// Per-pair seed as a pure function of (master_seed, pair_index).
constexpr std::uint64_t pair_seed(std::uint64_t master_seed, std::uint64_t pair_index) noexcept {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(pair_index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream stream) noexcept {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
}

/// Seeded random source with distribution transforms written out explicitly:
/// the standard library's distributions are implementation-defined, and
/// generated datasets must be identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Unbiased integer in [0, n) by rejection; n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal via the Box-Muller transform; the second variate of
    /// every pair is cached.
    double normal();

    /// Chi-square with integer degrees of freedom, as a sum of squared normals.
    double chi_square(int dof);

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace flarekit
