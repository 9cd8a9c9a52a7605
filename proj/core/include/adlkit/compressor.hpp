#pragma once

#include "adlkit/bitstring.hpp"
#include "adlkit/estimator.hpp"
#include "adlkit/function_class.hpp"
#include "adlkit/linalg.hpp"
#include "adlkit/random.hpp"

#include <cstddef>
#include <limits>
#include <memory>
#include <string>

namespace adlkit {

// Encoder side of a compressor, bound to one hypothesis class. encode()
// appends the codeword for hypothesis h, drawing its randomness from rng.
class Encoder {
public:
    virtual ~Encoder() = default;
    virtual void encode(RandomStream& rng, std::size_t h, BitString& out) const = 0;
};

// A stochastic compressor (E, D, Omega, mu): the encoder maps randomness
// and a hypothesis to bits, the decoder maps bits back to function values
// on the sample. Codewords are self-delimiting, so decode() consumes
// exactly one codeword from the reader and concatenations decode in
// sequence.
//
// sigma() and budget() are the claimed estimator parameter and expected
// code length; they are claims, checked by verify_estimator. An infinite
// value means no claim.
class Compressor {
public:
    virtual ~Compressor() = default;

    // The returned encoder may keep a reference to cls.
    virtual std::unique_ptr<const Encoder> bind(const FiniteFunctionClass& cls) const = 0;
    virtual FunctionValues decode(BitReader& in) const = 0;

    virtual std::size_t num_points() const = 0;
    virtual std::size_t dim() const = 0;
    virtual double sigma() const { return std::numeric_limits<double>::infinity(); }
    virtual double budget() const { return std::numeric_limits<double>::infinity(); }
    virtual std::string describe() const = 0;

    BitString encode(RandomStream& rng, const FiniteFunctionClass& cls, std::size_t h) const;
    // Decodes one codeword; trailing bits are a DecodeError.
    FunctionValues decode(const BitString& bits) const;
};

using CompressorPtr = std::shared_ptr<const Compressor>;

// Encodes the hypothesis index with ceil(log2 |H|) bits and decodes to the
// stored function. Deterministic: bias 0, variance 0.
CompressorPtr exact_compressor(FiniteFunctionClass cls);

// Applies the k-sketch to h(x) independently at every point. Each point
// emits k sketch codewords. `radius` bounds |h(x)| and fixes the claimed
// sigma = sqrt((1/4 + 2 radius^2)/k) and budget; pass infinity for no claim.
CompressorPtr sketch_compressor(std::size_t dim, std::size_t k, std::size_t num_points = 1,
                                double radius = std::numeric_limits<double>::infinity());

// k-sketch compressor for the ball {q : |q| <= radius} in R^d with
// k = ceil((1/4 + 2 radius^2) / sigma_target^2), so that it is a
// sigma_target-estimator. Requires 0 < sigma_target <= sqrt(1/4 + 2 radius^2).
CompressorPtr ball_compressor(double radius, std::size_t dim, double sigma_target, std::size_t num_points = 1);

// Number of averaged copies used by amplify: ceil(eps^-2).
std::size_t amplification_copies(double eps);

// Average of ceil(eps^-2) independent copies (eps in (0, 1]); the codeword
// is the concatenation of the copies' codewords. Claims sigma * eps and
// budget * copies. eps = 1 returns c itself.
CompressorPtr amplify(CompressorPtr c, double eps);
// Same, with an explicit copy count.
CompressorPtr amplify_copies(CompressorPtr c, std::size_t copies);

// Coordinate-wise median of k independent copies (lower median for even k).
// Generally biased; it targets sup-norm tail bounds. k = 1 returns c.
CompressorPtr median_boost(CompressorPtr c, std::size_t k);

// Compressor for the class U o H from a compressor for H, where U has
// orthonormal columns (rows = new dim, cols = c's dim): the hypothesis is
// pulled back with U^T, compressed, and the decoded values mapped by U.
// Code lengths are unchanged. Throws InvariantError if U^T U != I (1e-9).
CompressorPtr transport(CompressorPtr c, const Matrix& u);

// Monte Carlo verification of the sigma-estimator claim for hypothesis h:
// trial t encodes with rng.substream(t) and decodes. Throws DecodeError
// naming the trial when a codeword fails to decode or is not consumed
// exactly. Requires trials >= 1000.
EstimatorReport verify_estimator(const Compressor& c, const FiniteFunctionClass& cls,
                                 const EmpiricalDistribution& dist, std::size_t h, std::size_t trials,
                                 const RandomStream& rng, unsigned workers = 0);

// Lower median of a non-empty list (modifies the order of its argument).
double lower_median(std::span<double> values);

} // namespace adlkit
