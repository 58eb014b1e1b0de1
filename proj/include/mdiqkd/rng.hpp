#pragma once

#include <cstdint>

namespace mdiqkd {

/// Counter-based random stream keyed by (seed, stream_id).
///
/// Draw n of a stream is SplitMix64 of (key + n·γ), so the sequence depends only on the key and
/// never on how many other streams were consumed before. Gaussian and uniform conversions are
/// done here rather than through <random> distributions, whose output is implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform integer on [0, n).
    std::uint32_t uniform_index(std::uint32_t n) noexcept;
    int bit() noexcept { return static_cast<int>(next_u64() >> 63); }
    /// Standard normal (Box-Muller, second variate cached).
    double normal() noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Packs up to three small indices into a stream id: (a << 48) | (b << 32) | c.
constexpr std::uint64_t stream_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    return (a << 48) ^ (b << 32) ^ c;
}

}  // namespace mdiqkd
