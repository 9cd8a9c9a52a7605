#include "adlkit/random.hpp"

#include <cmath>
#include <numbers>

namespace adlkit {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t derive_key(std::uint64_t root_seed, std::span<const std::uint64_t> path)
{
    std::uint64_t key = mix64(root_seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t step : path) {
        key = mix64(key + kGolden * (mix64(step) | 1ULL));
    }
    return key;
}

} // namespace

RandomStream::RandomStream(std::uint64_t root_seed, std::vector<std::uint64_t> path)
    : root_seed_(root_seed), path_(std::move(path)), key_(derive_key(root_seed_, path_))
{
}

RandomStream RandomStream::substream(std::uint64_t index) const
{
    auto child = path_;
    child.push_back(index);
    return RandomStream(root_seed_, std::move(child));
}

std::uint64_t RandomStream::next_u64() noexcept
{
    const std::uint64_t x = key_ ^ (counter_++ * kGolden);
    return mix64(mix64(x) + key_);
}

double RandomStream::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t bound) noexcept
{
    // Lemire's nearly-divisionless method.
    unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            product = static_cast<unsigned __int128>(next_u64()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

double RandomStream::normal() noexcept
{
    // Box-Muller, one variate per call so the draw count stays fixed.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace adlkit
