#include "adlkit/sketch.hpp"

#include "adlkit/error.hpp"
#include "adlkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adlkit {

VectorSketcher::VectorSketcher(std::span<const double> w) : w_(w.begin(), w.end())
{
    const std::size_t d = w_.size();
    if (d == 0) {
        throw RangeError("sketch: empty vector");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        if (!std::isfinite(w_[i])) {
            throw InvariantError("sketch: non-finite entry at index " + std::to_string(i));
        }
        sq += w_[i] * w_[i];
    }
    norm_ = std::sqrt(sq);
    p_.resize(d);
    cdf_.resize(d);
    floor_.resize(d);
    frac_.resize(d);
    const double dd = static_cast<double>(d);
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        p_[i] = sq > 0.0 ? w_[i] * w_[i] / (2.0 * sq) + 1.0 / (2.0 * dd) : 1.0 / dd;
        acc += p_[i];
        cdf_[i] = acc;
        const double ratio = w_[i] / p_[i];
        floor_[i] = std::floor(ratio);
        frac_[i] = ratio - floor_[i];
    }
}

SketchOutcome VectorSketcher::sample(RandomStream& rng) const
{
    const double u = rng.uniform();
    const double b = rng.uniform();
    // The last bucket absorbs any rounding shortfall of the cumulative sum.
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end() - 1, u);
    const auto i = static_cast<std::size_t>(it - cdf_.begin());
    const double v = floor_[i] + (b < frac_[i] ? 1.0 : 0.0);
    return {i, static_cast<std::int64_t>(v)};
}

std::vector<std::pair<double, SketchOutcome>> VectorSketcher::outcome_law() const
{
    std::vector<std::pair<double, SketchOutcome>> law;
    for (std::size_t i = 0; i < w_.size(); ++i) {
        const auto lo = static_cast<std::int64_t>(floor_[i]);
        if (frac_[i] < 1.0) {
            law.push_back({p_[i] * (1.0 - frac_[i]), {i, lo}});
        }
        if (frac_[i] > 0.0) {
            law.push_back({p_[i] * frac_[i], {i, lo + 1}});
        }
    }
    return law;
}

SketchOutcome sketch_once(std::span<const double> w, RandomStream& rng)
{
    return VectorSketcher(w).sample(rng);
}

std::vector<double> reconstruct(const SketchOutcome& o, std::size_t d)
{
    if (o.index >= d) {
        throw RangeError("sketch: index " + std::to_string(o.index) + " out of range for d = " + std::to_string(d));
    }
    std::vector<double> v(d, 0.0);
    v[o.index] = static_cast<double>(o.value);
    return v;
}

std::vector<double> k_sketch(std::span<const double> w, std::size_t k, RandomStream& rng)
{
    if (k == 0) {
        throw RangeError("k_sketch: k must be positive");
    }
    const VectorSketcher sketcher(w);
    std::vector<double> out(w.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const auto o = sketcher.sample(rng);
        out[o.index] += static_cast<double>(o.value);
    }
    for (double& x : out) {
        x /= static_cast<double>(k);
    }
    return out;
}

void append_sketch(BitString& out, const SketchOutcome& o, std::size_t d)
{
    if (o.index >= d) {
        throw RangeError("sketch codec: index " + std::to_string(o.index) + " out of range for d = " +
                         std::to_string(d));
    }
    out.append_bits(o.index, fixed_width(d));
    const std::uint64_t magnitude =
        o.value < 0 ? static_cast<std::uint64_t>(-(o.value + 1)) + 1 : static_cast<std::uint64_t>(o.value);
    write_gamma(out, magnitude + 1);
    out.push_back(o.value < 0);
}

SketchOutcome read_sketch(BitReader& in, std::size_t d)
{
    const std::uint64_t index = in.read_bits(fixed_width(d));
    if (index >= d) {
        throw DecodeError("sketch codec: index " + std::to_string(index) + " out of range for d = " +
                          std::to_string(d));
    }
    const std::uint64_t magnitude = read_gamma(in) - 1;
    const bool negative = in.read_bit();
    if (negative && magnitude == 0) {
        throw DecodeError("sketch codec: negative zero");
    }
    if (magnitude > static_cast<std::uint64_t>(INT64_MAX)) {
        throw DecodeError("sketch codec: magnitude overflows");
    }
    const auto v = static_cast<std::int64_t>(magnitude);
    return {index, negative ? -v : v};
}

BitString encode_sketch(const SketchOutcome& o, std::size_t d)
{
    BitString out;
    append_sketch(out, o, d);
    return out;
}

SketchOutcome decode_sketch(const BitString& bits, std::size_t d)
{
    BitReader in(bits);
    const auto o = read_sketch(in, d);
    if (!in.at_end()) {
        throw DecodeError("sketch codec: " + std::to_string(in.remaining()) + " trailing bits");
    }
    return o;
}

std::size_t sketch_code_length(const SketchOutcome& o, std::size_t d) noexcept
{
    const std::uint64_t magnitude =
        o.value < 0 ? static_cast<std::uint64_t>(-(o.value + 1)) + 1 : static_cast<std::uint64_t>(o.value);
    return fixed_width(d) + gamma_length(magnitude + 1) + 1;
}

double sketch_bits_envelope(std::size_t d, double radius)
{
    const double dd = static_cast<double>(d);
    return static_cast<double>(fixed_width(d)) + 2.0 * std::ceil(std::log2(5.0 * dd * radius + 2.0)) + 3.0;
}

EstimatorReport measure_k_sketch(std::span<const double> w, std::size_t k, std::size_t trials,
                                 const RandomStream& rng, unsigned workers)
{
    if (k == 0) {
        throw RangeError("measure_k_sketch: k must be positive");
    }
    const VectorSketcher sketcher(w);
    const std::size_t d = w.size();
    const double weight = 1.0;
    const auto batches = make_batches(trials, 64);
    const auto parts = map_batches(batches, workers, [&](const BatchRange& batch) {
        MomentAccumulator acc(1, d, std::span(&weight, 1));
        std::vector<std::pair<std::size_t, double>> entries(k);
        for (std::size_t t = batch.begin; t < batch.end; ++t) {
            RandomStream trial = rng.substream(t);
            std::size_t bits = 0;
            for (std::size_t j = 0; j < k; ++j) {
                const auto o = sketcher.sample(trial);
                entries[j] = {static_cast<std::size_t>(o.index), static_cast<double>(o.value) / static_cast<double>(k)};
                bits += sketch_code_length(o, d);
            }
            acc.add_point_sparse(0, entries);
            acc.end_sample(bits);
        }
        return acc;
    });
    FunctionValues target(1, d);
    std::copy(w.begin(), w.end(), target.flat().begin());
    return summarize(parts, target);
}

} // namespace adlkit
