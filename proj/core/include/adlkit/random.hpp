#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace adlkit {

// Counter-based random source.
//
// A stream is identified by (root_seed, path). The key is a hash of that
// identity and the i-th draw is a pure function of (key, i), so substreams
// can be derived anywhere without shared state: substream(j) appends j to
// the path. Two streams with the same identity produce the same draws.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t root_seed, std::vector<std::uint64_t> path = {});

    std::uint64_t root_seed() const noexcept { return root_seed_; }
    std::span<const std::uint64_t> path() const noexcept { return path_; }

    // Child stream; does not depend on how many draws this stream has made.
    RandomStream substream(std::uint64_t index) const;

    std::uint64_t next_u64() noexcept;
    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    // Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;
    bool bernoulli(double p) noexcept { return uniform() < p; }
    double normal() noexcept;

    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t root_seed_;
    std::vector<std::uint64_t> path_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stafford "mix13" finalizer, the output function of SplitMix64.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace adlkit
