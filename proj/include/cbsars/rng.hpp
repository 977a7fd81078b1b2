#pragma once

#include <cstdint>
#include <random>

namespace cbsars {

/// Seeded source of uniform and standard normal variates.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniforms take the top 53 bits of one engine draw. Normals use the
/// Box-Muller transform on two uniforms, returning the cosine branch first and
/// caching the sine branch for the next call. No std distribution object is
/// involved, so the variate sequence depends on the seed alone.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    /// Sub-stream for replicate `index` of a run seeded with `seed`.
    /// Seeds are mixed through SplitMix64 so neighbouring indices decorrelate.
    static RngStream derive(std::uint64_t seed, std::uint64_t index);

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on the open interval (0, 1).
    double uniform();

    double normal();

    std::uint64_t next_u64() { return engine_(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace cbsars
