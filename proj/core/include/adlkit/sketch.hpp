#pragma once

#include "adlkit/bitstring.hpp"
#include "adlkit/estimator.hpp"
#include "adlkit/random.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace adlkit {

// One random sketch of w in R^d: the vector value * e_index.
struct SketchOutcome {
    std::uint64_t index = 0;
    std::int64_t value = 0;

    friend bool operator==(const SketchOutcome&, const SketchOutcome&) = default;
};

// Precomputed sampling law of the random sketch of a fixed vector w.
//
// Coordinate i is chosen with p_i = w_i^2 / (2 |w|^2) + 1 / (2d) (p_i = 1/d
// when w = 0), then value = floor(w_i / p_i) + b where b ~ Bernoulli of the
// fractional part. The reconstruction value * e_i is an unbiased estimate of
// w with E <u, w^ - w>^2 <= 1/4 + 2 |w|^2 for every unit u.
class VectorSketcher {
public:
    explicit VectorSketcher(std::span<const double> w);

    std::size_t dim() const noexcept { return w_.size(); }
    double norm() const noexcept { return norm_; }
    std::span<const double> vector() const noexcept { return w_; }
    std::span<const double> probabilities() const noexcept { return p_; }

    // Draws exactly two uniforms from rng.
    SketchOutcome sample(RandomStream& rng) const;

    // Every outcome with its probability (zero-probability outcomes omitted).
    std::vector<std::pair<double, SketchOutcome>> outcome_law() const;

private:
    std::vector<double> w_;
    std::vector<double> p_;
    std::vector<double> cdf_;
    std::vector<double> floor_;
    std::vector<double> frac_;
    double norm_ = 0.0;
};

SketchOutcome sketch_once(std::span<const double> w, RandomStream& rng);

// Dense reconstruction value * e_index in R^d.
std::vector<double> reconstruct(const SketchOutcome& o, std::size_t d);

// Mean of k independent sketches of w. Throws RangeError when k == 0.
std::vector<double> k_sketch(std::span<const double> w, std::size_t k, RandomStream& rng);

// Codec: ceil(log2 d) index bits, Elias gamma of |value| + 1, one sign bit
// (1 = negative; a negative zero is malformed). Codewords are prefix-free.
void append_sketch(BitString& out, const SketchOutcome& o, std::size_t d);
SketchOutcome read_sketch(BitReader& in, std::size_t d);
BitString encode_sketch(const SketchOutcome& o, std::size_t d);
// Decodes exactly one codeword; trailing bits are an error.
SketchOutcome decode_sketch(const BitString& bits, std::size_t d);
std::size_t sketch_code_length(const SketchOutcome& o, std::size_t d) noexcept;

// Upper bound on the code length of one sketch of a vector of norm <= radius:
// ceil(log2 d) + 2 ceil(log2(5 d radius + 2)) + 3.
double sketch_bits_envelope(std::size_t d, double radius);

// Monte Carlo statistics of the k-sketch of w over `trials` draws, using
// substream t of rng for trial t. Exploits sparsity, so it is much faster
// than the generic compressor verifier.
EstimatorReport measure_k_sketch(std::span<const double> w, std::size_t k, std::size_t trials,
                                 const RandomStream& rng, unsigned workers = 0);

} // namespace adlkit
