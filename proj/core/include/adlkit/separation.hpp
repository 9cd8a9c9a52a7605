#pragma once

#include "adlkit/cover.hpp"
#include "adlkit/estimator.hpp"
#include "adlkit/function_class.hpp"
#include "adlkit/linalg.hpp"
#include "adlkit/random.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace adlkit {

inline constexpr unsigned kMaxHadamardLog2 = 14;

// Sylvester Hadamard matrix of size 2^n, normalized to be orthogonal:
// entry (i, j) = 2^{-n/2} (-1)^{popcount(i & j)}.
class HadamardMatrix {
public:
    // Throws RangeError when log2_size > 14.
    explicit HadamardMatrix(unsigned log2_size);

    unsigned log2_size() const noexcept { return log2_size_; }
    std::size_t size() const noexcept { return std::size_t{1} << log2_size_; }
    int sign(std::size_t i, std::size_t j) const noexcept;
    double operator()(std::size_t i, std::size_t j) const noexcept { return sign(i, j) * scale_; }

    Matrix dense() const;
    // The first `count` columns.
    Matrix columns(std::size_t count) const;

private:
    unsigned log2_size_;
    double scale_;
};

HadamardMatrix hadamard(unsigned log2_size);

// Smallest power of two n with n >= d^{2 + 2/alpha}.
std::size_t embedding_dimension(std::size_t d, double alpha);

// {+1, -1}^d as a class with one point and dim = d; member k has
// s_j = -1 exactly when bit j of k is set.
FiniteFunctionClass sign_cube(std::size_t d);

struct EmbeddedCubeClass {
    std::size_t d = 0;
    double alpha = 1.0;
    std::size_t n = 0;
    Matrix a;                       // n x d, Hadamard columns 0..d-1
    FiniteFunctionClass cube;       // {A s}: 1 point, dim n
    FiniteFunctionClass raw_cube;   // {s}: 1 point, dim d

    double sup_envelope() const;    // d / sqrt(n)
};

// Throws RangeError unless d >= 1, 0 < alpha <= 1 and n <= 2^14, and
// InvariantError if any class invariant fails.
EmbeddedCubeClass build_embedded_cube(std::size_t d, double alpha);

struct EmbeddingChecks {
    double orthonormality_defect = 0.0;  // max |A^T A - I|
    double max_sup_norm = 0.0;           // max_s |A s|_inf
    double isometry_defect = 0.0;        // max | |As - As'|_2 - |s - s'|_2 |
    double min_pairwise_sup = 0.0;       // min_{s != s'} |As - As'|_inf
};
EmbeddingChecks check_embedding(const EmbeddedCubeClass& e, unsigned workers = 0);

struct SeparationCoverRow {
    double eps = 0.0;
    std::size_t cover_size = 0;   // upper bound; equals lower_bound when exact
    std::size_t lower_bound = 0;
    bool exact = false;
    std::string method;
};

// Bits spent by the k-sketch compressor on the cube {+-1}^d to reach a
// measured lambda_max <= 1. By orthonormal transport the same codewords
// serve the embedded class.
struct SketchCostPoint {
    std::size_t d = 0;
    double lambda_single = 0.0;   // measured lambda_max of one sketch
    std::size_t k = 0;
    double lambda_at_k = 0.0;
    double lambda_std_err = 0.0;
    double bits_per_sketch = 0.0;
    double bits_at_sigma1 = 0.0;  // measured mean bits of the k-sketch
};

SketchCostPoint sketch_cost_to_unit_sigma(std::size_t d, std::size_t trials, const RandomStream& rng,
                                          unsigned workers = 0);

// Cost points for each d, with substream i of rng for the i-th entry.
// Throws InvariantError if bits_at_sigma1 is not non-decreasing in d.
std::vector<SketchCostPoint> sketch_cost_curve(const std::vector<std::size_t>& dims, std::size_t trials,
                                               const RandomStream& rng, unsigned workers = 0);

struct SeparationReport {
    std::size_t d = 0;
    double alpha = 1.0;
    std::size_t n = 0;
    double sup_envelope = 0.0;
    EmbeddingChecks checks;
    std::vector<SeparationCoverRow> covers;
    SketchCostPoint cost;
    std::string adl_lower_bound_note;
};

// Covers of the embedded class at every eps (inner sup norm, one point).
// Centers may be any class member or the zero function. Exact when
// 2^d <= 24; otherwise a greedy upper bound paired with a packing lower
// bound. Throws InvariantError if a cover at eps >= d/sqrt(n) is larger than
// 1 or any cover exceeds 2^d. Requires d <= 12.
SeparationReport verify_separation(std::size_t d, double alpha, const std::vector<double>& eps_grid,
                                   std::size_t trials, const RandomStream& rng, unsigned workers = 0);

void to_json(nlohmann::json& j, const EmbeddingChecks& c);
void to_json(nlohmann::json& j, const SeparationCoverRow& r);
void to_json(nlohmann::json& j, const SketchCostPoint& p);
void to_json(nlohmann::json& j, const SeparationReport& r);

} // namespace adlkit
