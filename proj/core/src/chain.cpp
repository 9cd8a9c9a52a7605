#include "adlkit/chain.hpp"

#include "adlkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adlkit {

double ChainCompressorSpec::expected_bits() const
{
    double total = zero_prob * static_cast<double>(per_scale_bits[0]);
    for (std::size_t n = 1; n <= n_max; ++n) {
        total += scale_probs[n] * static_cast<double>(per_scale_bits[n]);
    }
    return total;
}

double ChainCompressorSpec::expected_index_bits() const
{
    double total = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        total += scale_probs[n] * static_cast<double>(fixed_width(cover_sizes[n]) + fixed_width(cover_sizes[n - 1]));
    }
    return total;
}

ChainCompressorSpec chain_compressor_spec(const CoverChain& chain, double a)
{
    if (!(a > 0.0) || a > 1.0) {
        throw RangeError("chain compressor: a must lie in (0, 1]");
    }
    ChainCompressorSpec s;
    s.a = a;
    s.n_max = chain.n_max;
    s.scale_probs.assign(chain.n_max + 1, 0.0);
    s.per_scale_bits.assign(chain.n_max + 1, 0);
    for (const auto& cover : chain.covers) {
        s.cover_sizes.push_back(cover.size());
    }
    double mass = 0.0;
    for (std::size_t n = 1; n <= chain.n_max; ++n) {
        s.scale_probs[n] = std::exp2(-static_cast<double>(n) * (2.0 - a / 2.0));
        mass += s.scale_probs[n];
        s.per_scale_bits[n] =
            gamma_length(n + 1) + fixed_width(s.cover_sizes[n]) + fixed_width(s.cover_sizes[n - 1]);
    }
    s.zero_prob = 1.0 - mass;
    s.scale_probs[0] = s.zero_prob;
    s.per_scale_bits[0] = gamma_length(1);
    if (s.zero_prob < 0.0) {
        throw InvariantError("chain compressor: scale probabilities exceed 1");
    }
    return s;
}

ChainCompressor::ChainCompressor(CoverChain chain, double a)
    : chain_(std::move(chain)), spec_(chain_compressor_spec(chain_, a))
{
    if (const auto problem = check_cover_chain(chain_); !problem.empty()) {
        throw InvariantError("chain compressor: invalid chain: " + problem);
    }
}

namespace {

class ChainEncoder final : public Encoder {
public:
    explicit ChainEncoder(const ChainCompressor& parent) : parent_(parent) {}

    void encode(RandomStream& rng, std::size_t h, BitString& out) const override
    {
        const auto& spec = parent_.spec();
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t scale = 0;
        for (std::size_t n = 1; n <= spec.n_max; ++n) {
            acc += spec.scale_probs[n];
            if (u < acc) {
                scale = n;
                break;
            }
        }
        parent_.write_branch(h, scale, out);
    }

private:
    const ChainCompressor& parent_;
};

} // namespace

std::unique_ptr<const Encoder> ChainCompressor::bind(const FiniteFunctionClass& cls) const
{
    const auto& ext = chain_.extended;
    const bool same = cls.num_hypotheses() + 1 == ext.num_hypotheses() && cls.num_points() == ext.num_points() &&
                      cls.dim() == ext.dim() &&
                      std::equal(cls.values().begin(), cls.values().end(),
                                 ext.values().begin() + static_cast<std::ptrdiff_t>(ext.num_points() * ext.dim()));
    if (!same) {
        throw InvariantError("chain compressor: bound to a class other than the chain's");
    }
    return std::make_unique<ChainEncoder>(*this);
}

void ChainCompressor::write_branch(std::size_t h, std::size_t scale, BitString& out) const
{
    if (h >= chain_.num_hypotheses()) {
        throw RangeError("chain compressor: hypothesis " + std::to_string(h) + " out of range");
    }
    if (scale == 0) {
        write_gamma(out, 1);
        return;
    }
    write_gamma(out, scale + 1);
    out.append_bits(chain_.assignment[scale][h], fixed_width(spec_.cover_sizes[scale]));
    out.append_bits(chain_.assignment[scale - 1][h], fixed_width(spec_.cover_sizes[scale - 1]));
}

FunctionValues ChainCompressor::decode(BitReader& in) const
{
    FunctionValues out(num_points(), dim());
    const std::uint64_t g = read_gamma(in);
    if (g == 1) {
        return out;
    }
    const std::uint64_t scale = g - 1;
    if (scale > spec_.n_max) {
        throw DecodeError("chain compressor: scale " + std::to_string(scale) + " beyond n_max = " +
                          std::to_string(spec_.n_max));
    }
    const std::uint64_t pos = in.read_bits(fixed_width(spec_.cover_sizes[scale]));
    const std::uint64_t prev = in.read_bits(fixed_width(spec_.cover_sizes[scale - 1]));
    if (pos >= spec_.cover_sizes[scale] || prev >= spec_.cover_sizes[scale - 1]) {
        throw DecodeError("chain compressor: cover index out of range");
    }
    const auto fine = chain_.extended.hypothesis(chain_.covers[scale][pos]);
    const auto coarse = chain_.extended.hypothesis(chain_.covers[scale - 1][prev]);
    const double q = spec_.scale_probs[scale];
    for (std::size_t i = 0; i < out.flat().size(); ++i) {
        out.flat()[i] = (fine[i] - coarse[i]) / q;
    }
    return out;
}

std::string ChainCompressor::describe() const
{
    std::ostringstream s;
    s << "chain(a=" << spec_.a << ", n_max=" << spec_.n_max << ")";
    return s.str();
}

std::vector<ChainOutcome> ChainCompressor::outcomes(std::size_t h) const
{
    std::vector<ChainOutcome> out;
    for (std::size_t n = 0; n <= spec_.n_max; ++n) {
        const double p = spec_.scale_probs[n];
        if (p <= 0.0) {
            continue;
        }
        BitString code;
        write_branch(h, n, code);
        auto value = Compressor::decode(code);
        out.push_back({p, n, std::move(code), std::move(value)});
    }
    return out;
}

std::shared_ptr<const ChainCompressor> build_chain_compressor(CoverChain chain, double a)
{
    return std::make_shared<ChainCompressor>(std::move(chain), a);
}

ExactChainMoments exact_chain_moments(const ChainCompressor& c, std::size_t h)
{
    const auto branches = c.outcomes(h);
    const auto& chain = c.chain();
    const std::size_t m = c.num_points();
    const std::size_t d = c.dim();
    const auto target = chain.extended.function(h + 1);
    ExactChainMoments r;
    r.second_moment = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    FunctionValues mean(m, d);
    for (const auto& b : branches) {
        r.expected_bits += b.probability * static_cast<double>(b.codeword.size());
        for (std::size_t x = 0; x < m; ++x) {
            Vector delta(static_cast<Eigen::Index>(d));
            for (std::size_t k = 0; k < d; ++k) {
                mean.at(x, k) += b.probability * b.value.at(x, k);
                delta(static_cast<Eigen::Index>(k)) = b.value.at(x, k) - target.at(x, k);
                r.raw_second_moment += chain.distribution[x] * b.probability * b.value.at(x, k) * b.value.at(x, k);
            }
            r.second_moment.noalias() += chain.distribution[x] * b.probability * delta * delta.transpose();
        }
    }
    for (std::size_t i = 0; i < mean.flat().size(); ++i) {
        r.bias_max = std::max(r.bias_max, std::abs(mean.flat()[i] - target.flat()[i]));
    }
    r.lambda_max = second_moment_top_eig(r.second_moment);
    return r;
}

double chain_variance_bound(std::size_t n_max, double a)
{
    double total = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        total += 16.0 * std::exp2(-a * static_cast<double>(n) / 2.0);
    }
    return total;
}

double chain_variance_bound(const CoverChain& chain, double a)
{
    return chain_variance_bound(chain.n_max, a);
}

double chain_bits_envelope(double a, double d)
{
    const double r = std::exp2(-a / 2.0);
    return 2.0 * r / (1.0 - r) * d;
}

double chain_log_size_constant(const ChainCompressorSpec& spec)
{
    double d = 0.0;
    for (std::size_t n = 1; n <= spec.n_max; ++n) {
        const double eps = std::exp2(-static_cast<double>(n));
        d = std::max(d, static_cast<double>(fixed_width(spec.cover_sizes[n])) * std::pow(eps, 2.0 - spec.a));
    }
    return d;
}

std::size_t unit_sigma_copies(double lambda_max)
{
    if (!std::isfinite(lambda_max) || lambda_max < 0.0) {
        throw RangeError("normalize_to_unit_sigma: lambda_max must be finite and nonnegative");
    }
    return static_cast<std::size_t>(std::max(1.0, std::ceil(lambda_max - 1e-9)));
}

CompressorPtr normalize_to_unit_sigma(CompressorPtr c, double lambda_max)
{
    return amplify_copies(std::move(c), unit_sigma_copies(lambda_max));
}

NormalizedCompressor normalize_to_unit_sigma(CompressorPtr c, const FiniteFunctionClass& cls,
                                             const EmpiricalDistribution& dist, std::size_t trials,
                                             const RandomStream& rng, unsigned workers)
{
    NormalizedCompressor out;
    const RandomStream before = rng.substream(0);
    for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
        const auto r = verify_estimator(*c, cls, dist, h, trials, before.substream(h), workers);
        out.lambda_before = std::max(out.lambda_before, r.lambda_max);
        out.bits_before = std::max(out.bits_before, r.mean_bits);
    }
    out.copies = unit_sigma_copies(out.lambda_before);
    out.compressor = amplify_copies(std::move(c), out.copies);
    const RandomStream after = rng.substream(1);
    for (std::size_t h = 0; h < cls.num_hypotheses(); ++h) {
        const auto r = verify_estimator(*out.compressor, cls, dist, h, trials, after.substream(h), workers);
        out.lambda_after = std::max(out.lambda_after, r.lambda_max);
        out.bits_after = std::max(out.bits_after, r.mean_bits);
    }
    return out;
}

void to_json(nlohmann::json& j, const ChainCompressorSpec& s)
{
    nlohmann::json scales = nlohmann::json::array();
    for (std::size_t n = 0; n <= s.n_max; ++n) {
        scales.push_back({{"n", n},
                          {"eps", std::exp2(-static_cast<double>(n))},
                          {"q", s.scale_probs[n]},
                          {"bits", s.per_scale_bits[n]},
                          {"cover_size", s.cover_sizes[n]}});
    }
    j = nlohmann::json{{"a", s.a},
                       {"n_max", s.n_max},
                       {"zero_prob", s.zero_prob},
                       {"expected_bits", s.expected_bits()},
                       {"expected_index_bits", s.expected_index_bits()},
                       {"scales", scales}};
}

} // namespace adlkit
