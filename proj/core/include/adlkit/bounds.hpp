#pragma once

#include "adlkit/function_class.hpp"
#include "adlkit/random.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adlkit {

// Bounded loss on R^d x R^d, Lipschitz in the prediction w.r.t. the sup norm.
//   squared-clipped:  min(|p - y|_inf^2, B), L = 2 sqrt(B)
//   absolute-clipped: min(|p - y|_inf, B),   L = 1
enum class LossKind { squared_clipped, absolute_clipped };

struct LossSpec {
    LossKind kind = LossKind::absolute_clipped;
    double bound = 1.0;  // B

    static LossSpec squared_clipped(double bound);
    static LossSpec absolute_clipped(double bound);

    double lipschitz() const;
    double operator()(std::span<const double> prediction, std::span<const double> label) const;
};

std::string to_string(LossKind k);
LossKind parse_loss_kind(const std::string& s);

// Finite joint distribution over (sample point, label) pairs. Labels have
// the class's dim.
struct LabeledAtom {
    std::size_t point = 0;
    std::vector<double> label;
    double probability = 0.0;
};

class JointDistribution {
public:
    // Throws RangeError on an empty support and InvariantError unless
    // probabilities are nonnegative and sum to 1 within 1e-12.
    explicit JointDistribution(std::vector<LabeledAtom> atoms);

    std::span<const LabeledAtom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    // Index of the atom at cumulative mass u in [0, 1).
    std::size_t locate(double u) const;

private:
    std::vector<LabeledAtom> atoms_;
    std::vector<double> cdf_;
};

struct RepEstimate {
    double mean_rep = 0.0;
    double std_err = 0.0;
    std::size_t trials = 0;
    std::size_t m = 0;
};

// Monte Carlo estimate of E_S sup_h (l_D(h) - l_S(h)) over i.i.d. samples of
// size m. Trial t draws its sample from rng.substream(t). l_D is exact.
RepEstimate rep_estimate(const FiniteFunctionClass& cls, const JointDistribution& joint, const LossSpec& loss,
                         std::size_t m, std::size_t trials, const RandomStream& rng, unsigned workers = 0);

// Log-cover envelopes implied by an ADL budget of n bits.
//   single:          2 ceil(4 / eps^2) n
//   multi_proof:     2 k ceil(16 / eps^2) n with k = max(1, ceil(log2 d))
//   multi_statement: ceil(16 / eps^2) ceil(ln(d m)) n
enum class CoverBoundForm { single, multi_proof, multi_statement };
double adl_to_cover_bound(double n, double eps, std::size_t d, std::size_t m, CoverBoundForm form);

// (L + B) sqrt(n / m) ln m, plus B sqrt(2 ln(2 / delta) / m) when delta is
// given. Natural log; universal constant set to 1. Requires m >= 2 and
// delta in (0, 2].
double cover_to_rep_bound(double n, std::size_t m, double lipschitz, double bound,
                          std::optional<double> delta = std::nullopt);

// vc / eps (universal constant set to 1). Requires eps > 0.
double haussler_bound(std::size_t vc, double eps);

// Thresholds x >= t on the grid x_i = i / points, for t = i / points,
// i = 0..points: points + 1 hypotheses with values in {0, 1}.
FiniteFunctionClass threshold_class(std::size_t points);

// Uniform point, label = 1[x_i >= threshold], flipped with probability noise.
JointDistribution noisy_threshold_joint(std::size_t points, std::size_t threshold, double noise);

struct RepBoundRow {
    std::size_t m = 0;
    double bound = 0.0;
    double measured_rep = 0.0;
    double std_err = 0.0;
};

void to_json(nlohmann::json& j, const RepEstimate& r);
void to_json(nlohmann::json& j, const RepBoundRow& r);

} // namespace adlkit
