#pragma once

#include "adlkit/compressor.hpp"
#include "adlkit/cover.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <memory>
#include <vector>

namespace adlkit {

// Branch law of the multi-resolution compressor over a cover chain.
//
// Scale n >= 1 is drawn with probability q_n = 2^{-n(2 - a/2)} =
// eps_n^{2 - a/2} and outputs (h_n - h_{n-1}) / q_n; the remaining mass
// zero_prob outputs 0. Summing q_n * (h_n - h_{n-1}) / q_n telescopes to
// h_{n_max} = h, so the estimate is exactly unbiased.
struct ChainCompressorSpec {
    double a = 0.5;
    std::size_t n_max = 0;
    std::vector<double> scale_probs;          // q_n at index n; index 0 holds zero_prob
    double zero_prob = 1.0;
    // b_n at index n: gamma(n + 1) prefix + ceil(log2 |H_n|) + ceil(log2 |H_{n-1}|);
    // index 0 is the 1-bit zero-branch codeword.
    std::vector<std::size_t> per_scale_bits;
    std::vector<std::size_t> cover_sizes;     // |H_n|

    // zero_prob * 1 + sum_n q_n b_n
    double expected_bits() const;
    // Expected bits spent on cover indices only (no scale prefix, no zero branch).
    double expected_index_bits() const;
};

ChainCompressorSpec chain_compressor_spec(const CoverChain& chain, double a);

// One branch of the compressor's finite outcome space for a hypothesis.
struct ChainOutcome {
    double probability;
    std::size_t scale;   // 0 = zero branch
    BitString codeword;
    FunctionValues value;
};

class ChainCompressor final : public Compressor {
public:
    // Throws RangeError unless 0 < a <= 1, InvariantError if the chain's
    // invariants fail (including exactness at the last scale).
    ChainCompressor(CoverChain chain, double a);

    const CoverChain& chain() const noexcept { return chain_; }
    const ChainCompressorSpec& spec() const noexcept { return spec_; }

    std::unique_ptr<const Encoder> bind(const FiniteFunctionClass& cls) const override;
    using Compressor::decode;
    FunctionValues decode(BitReader& in) const override;
    std::size_t num_points() const override { return chain_.extended.num_points(); }
    std::size_t dim() const override { return chain_.extended.dim(); }
    double budget() const override { return spec_.expected_bits(); }
    std::string describe() const override;

    // Appends the codeword of branch `scale` for hypothesis h.
    void write_branch(std::size_t h, std::size_t scale, BitString& out) const;
    // Every branch with its probability, codeword and decoded value.
    std::vector<ChainOutcome> outcomes(std::size_t h) const;

private:
    CoverChain chain_;
    ChainCompressorSpec spec_;
};

std::shared_ptr<const ChainCompressor> build_chain_compressor(CoverChain chain, double a);

// Exact first and second moments of the compressor for hypothesis h,
// computed over its finite outcome space.
struct ExactChainMoments {
    double bias_max = 0.0;
    double expected_bits = 0.0;
    Matrix second_moment;        // E_x E (C(h)(x) - h(x))(...)^T
    double lambda_max = 0.0;
    double raw_second_moment = 0.0; // E_x E |C(h)(x)|^2 (trace form)
};
ExactChainMoments exact_chain_moments(const ChainCompressor& c, std::size_t h);

// sum_{n=1}^{n_max} 4 eps_{n-1}^2 / eps_n^{2 - a/2} = sum 16 * 2^{-a n / 2}.
double chain_variance_bound(const CoverChain& chain, double a);
double chain_variance_bound(std::size_t n_max, double a);

// Expected-bit envelope (2 * 2^{-a/2} / (1 - 2^{-a/2})) * d for chains with
// log2 |H_n| <= d / eps_n^{2-a}.
double chain_bits_envelope(double a, double d);
// Smallest d for which this chain satisfies that log-size hypothesis:
// max_n ceil(log2 |H_n|) * eps_n^{2-a}.
double chain_log_size_constant(const ChainCompressorSpec& spec);

// Number of averaged copies that bring a measured lambda_max to <= 1:
// ceil(lambda_max), at least 1.
std::size_t unit_sigma_copies(double lambda_max);
CompressorPtr normalize_to_unit_sigma(CompressorPtr c, double lambda_max);

struct NormalizedCompressor {
    CompressorPtr compressor;
    std::size_t copies = 1;
    double lambda_before = 0.0;  // max over hypotheses
    double lambda_after = 0.0;
    double bits_before = 0.0;    // max over hypotheses of measured mean bits
    double bits_after = 0.0;
};

// Measures lambda_max of c on every hypothesis, amplifies by
// unit_sigma_copies of the worst one, and re-measures.
NormalizedCompressor normalize_to_unit_sigma(CompressorPtr c, const FiniteFunctionClass& cls,
                                             const EmpiricalDistribution& dist, std::size_t trials,
                                             const RandomStream& rng, unsigned workers = 0);

void to_json(nlohmann::json& j, const ChainCompressorSpec& s);

} // namespace adlkit
