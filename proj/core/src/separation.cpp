#include "adlkit/separation.hpp"

#include "adlkit/error.hpp"
#include "adlkit/parallel.hpp"
#include "adlkit/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace adlkit {

HadamardMatrix::HadamardMatrix(unsigned log2_size)
    : log2_size_(log2_size), scale_(std::exp2(-0.5 * static_cast<double>(log2_size)))
{
    if (log2_size > kMaxHadamardLog2) {
        throw RangeError("hadamard: log2_size " + std::to_string(log2_size) + " exceeds the guard of " +
                         std::to_string(kMaxHadamardLog2));
    }
}

int HadamardMatrix::sign(std::size_t i, std::size_t j) const noexcept
{
    return (std::popcount(static_cast<std::uint64_t>(i & j)) & 1U) != 0 ? -1 : 1;
}

Matrix HadamardMatrix::dense() const
{
    return columns(size());
}

Matrix HadamardMatrix::columns(std::size_t count) const
{
    const std::size_t n = size();
    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < count; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j);
        }
    }
    return out;
}

HadamardMatrix hadamard(unsigned log2_size)
{
    return HadamardMatrix(log2_size);
}

std::size_t embedding_dimension(std::size_t d, double alpha)
{
    if (d == 0) {
        throw RangeError("embedded cube: d must be at least 1");
    }
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw RangeError("embedded cube: alpha must lie in (0, 1]");
    }
    // pow is not exact; d^4 at alpha = 1 must not round up past a power of two.
    const double target = std::pow(static_cast<double>(d), 2.0 + 2.0 / alpha) * (1.0 - 1e-12);
    std::size_t n = 1;
    unsigned log2 = 0;
    while (static_cast<double>(n) < target) {
        n <<= 1;
        if (++log2 > kMaxHadamardLog2) {
            throw RangeError("embedded cube: n = d^(2+2/alpha) exceeds 2^" + std::to_string(kMaxHadamardLog2));
        }
    }
    return n;
}

FiniteFunctionClass sign_cube(std::size_t d)
{
    if (d == 0 || d > 20) {
        throw RangeError("sign cube: d must lie in [1, 20]");
    }
    const std::size_t members = std::size_t{1} << d;
    std::vector<double> values(members * d);
    for (std::size_t k = 0; k < members; ++k) {
        for (std::size_t j = 0; j < d; ++j) {
            values[k * d + j] = ((k >> j) & 1U) != 0 ? -1.0 : 1.0;
        }
    }
    return FiniteFunctionClass(members, 1, d, std::move(values));
}

double EmbeddedCubeClass::sup_envelope() const
{
    return static_cast<double>(d) / std::sqrt(static_cast<double>(n));
}

namespace {

// The rows of A depend only on the low ceil(log2 d) bits of the row index,
// so A has 2^b distinct rows, each repeated n / 2^b times.
struct DistinctRows {
    Matrix rows;
    double multiplicity;
};

DistinctRows distinct_rows(const EmbeddedCubeClass& e)
{
    const std::size_t r = std::size_t{1} << fixed_width(e.d);
    return {e.a.topRows(static_cast<Eigen::Index>(r)), static_cast<double>(e.n / r)};
}

Vector sign_vector(std::size_t k, std::size_t d)
{
    Vector s(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
        s(static_cast<Eigen::Index>(j)) = ((k >> j) & 1U) != 0 ? -1.0 : 1.0;
    }
    return s;
}

FiniteFunctionClass class_from_columns(const Matrix& images)
{
    const auto rows = static_cast<std::size_t>(images.rows());
    const auto cols = static_cast<std::size_t>(images.cols());
    std::vector<double> values(rows * cols);
    for (std::size_t k = 0; k < cols; ++k) {
        for (std::size_t i = 0; i < rows; ++i) {
            values[k * rows + i] = images(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        }
    }
    return FiniteFunctionClass(cols, 1, rows, std::move(values));
}

Matrix cube_images(const Matrix& a, std::size_t d)
{
    const std::size_t members = std::size_t{1} << d;
    Matrix s(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(members));
    for (std::size_t k = 0; k < members; ++k) {
        s.col(static_cast<Eigen::Index>(k)) = sign_vector(k, d);
    }
    return a * s;
}

} // namespace

EmbeddedCubeClass build_embedded_cube(std::size_t d, double alpha)
{
    const std::size_t n = embedding_dimension(d, alpha);
    if (d > 20 || (std::size_t{1} << d) * n > (std::size_t{1} << 24)) {
        throw RangeError("embedded cube: 2^d * n exceeds 2^24 stored values");
    }
    Matrix a = hadamard(static_cast<unsigned>(std::countr_zero(n))).columns(d);
    auto cube = class_from_columns(cube_images(a, d));
    EmbeddedCubeClass e{d, alpha, n, std::move(a), std::move(cube), sign_cube(d)};
    const auto checks = check_embedding(e, 1);
    if (checks.orthonormality_defect > 1e-10) {
        throw InvariantError("embedded cube: columns are not orthonormal");
    }
    if (checks.max_sup_norm > e.sup_envelope() * (1.0 + 1e-12)) {
        throw InvariantError("embedded cube: a member exceeds the sup envelope d/sqrt(n)");
    }
    if (checks.isometry_defect > 1e-10) {
        throw InvariantError("embedded cube: embedding is not an isometry");
    }
    return e;
}

EmbeddingChecks check_embedding(const EmbeddedCubeClass& e, unsigned workers)
{
    EmbeddingChecks out;
    out.orthonormality_defect = orthonormality_defect(e.a);
    const auto reduced = distinct_rows(e);
    const Matrix images = cube_images(reduced.rows, e.d);
    const std::size_t members = std::size_t{1} << e.d;
    const auto batches = make_batches(members, 64);
    const auto parts = map_batches(batches, workers, [&](const BatchRange& b) {
        EmbeddingChecks c;
        c.min_pairwise_sup = std::numeric_limits<double>::infinity();
        for (std::size_t k = b.begin; k < b.end; ++k) {
            const auto col = images.col(static_cast<Eigen::Index>(k));
            c.max_sup_norm = std::max(c.max_sup_norm, col.cwiseAbs().maxCoeff());
            for (std::size_t l = k + 1; l < members; ++l) {
                const Vector diff = col - images.col(static_cast<Eigen::Index>(l));
                c.min_pairwise_sup = std::min(c.min_pairwise_sup, diff.cwiseAbs().maxCoeff());
                const double embedded = std::sqrt(reduced.multiplicity * diff.squaredNorm());
                const double cube = 2.0 * std::sqrt(static_cast<double>(std::popcount(k ^ l)));
                c.isometry_defect = std::max(c.isometry_defect, std::abs(embedded - cube));
            }
        }
        return c;
    });
    out.min_pairwise_sup = std::numeric_limits<double>::infinity();
    for (const auto& c : parts) {
        out.max_sup_norm = std::max(out.max_sup_norm, c.max_sup_norm);
        out.isometry_defect = std::max(out.isometry_defect, c.isometry_defect);
        out.min_pairwise_sup = std::min(out.min_pairwise_sup, c.min_pairwise_sup);
    }
    if (members == 1) {
        out.min_pairwise_sup = 0.0;
    }
    return out;
}

SketchCostPoint sketch_cost_to_unit_sigma(std::size_t d, std::size_t trials, const RandomStream& rng,
                                          unsigned workers)
{
    // Every cube vertex is a coordinate sign flip of the all-ones vector, which
    // maps sketches to sketches and conjugates the error covariance by a
    // diagonal sign matrix, so one vertex gives the spectrum of all.
    const std::vector<double> w(d, 1.0);
    SketchCostPoint p;
    p.d = d;
    const auto single = measure_k_sketch(w, 1, trials, rng.substream(0), workers);
    p.lambda_single = single.lambda_max;
    p.bits_per_sketch = single.mean_bits;
    p.k = static_cast<std::size_t>(std::max(1.0, std::ceil(single.lambda_max - 1e-9)));
    for (;;) {
        const auto r = measure_k_sketch(w, p.k, trials, rng.substream(p.k), workers);
        p.lambda_at_k = r.lambda_max;
        p.lambda_std_err = r.lambda_std_err;
        p.bits_at_sigma1 = r.mean_bits;
        if (r.lambda_max <= 1.0) {
            return p;
        }
        ++p.k;
    }
}

std::vector<SketchCostPoint> sketch_cost_curve(const std::vector<std::size_t>& dims, std::size_t trials,
                                               const RandomStream& rng, unsigned workers)
{
    std::vector<SketchCostPoint> out;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        out.push_back(sketch_cost_to_unit_sigma(dims[i], trials, rng.substream(i), workers));
        if (i > 0 && dims[i] > dims[i - 1] && out[i].bits_at_sigma1 < out[i - 1].bits_at_sigma1) {
            throw InvariantError("sketch cost curve: bits to unit sigma decreased from d = " +
                                 std::to_string(dims[i - 1]) + " to d = " + std::to_string(dims[i]));
        }
    }
    return out;
}

SeparationReport verify_separation(std::size_t d, double alpha, const std::vector<double>& eps_grid,
                                   std::size_t trials, const RandomStream& rng, unsigned workers)
{
    if (d == 0 || d > 12) {
        throw RangeError("separation: d must lie in [1, 12]");
    }
    for (const double eps : eps_grid) {
        if (!(eps > 0.0) || !std::isfinite(eps)) {
            throw RangeError("separation: every eps must be positive and finite");
        }
    }
    const auto e = build_embedded_cube(d, alpha);
    SeparationReport r;
    r.d = d;
    r.alpha = alpha;
    r.n = e.n;
    r.sup_envelope = e.sup_envelope();
    r.checks = check_embedding(e, workers);

    // Sup distances only see the distinct rows, so covers are computed there.
    const auto reduced = distinct_rows(e);
    const auto cls = class_from_columns(cube_images(reduced.rows, d));
    const std::size_t members = cls.num_hypotheses();
    const auto dist = EmpiricalDistribution::uniform(1);
    const NormSpec norm{InnerNorm::sup};
    std::vector<double> with_origin(cls.values().begin(), cls.values().end());
    with_origin.resize(with_origin.size() + cls.dim(), 0.0);
    const FiniteFunctionClass centers(members + 1, 1, cls.dim(), std::move(with_origin));

    for (const double eps : eps_grid) {
        SeparationCoverRow row;
        row.eps = eps;
        if (members <= kExactGuard) {
            row.cover_size = exact_cover_with_centers(cls, centers, dist, eps, norm).size();
            row.lower_bound = row.cover_size;
            row.exact = true;
            row.method = "exact";
        } else {
            row.cover_size = within(r.checks.max_sup_norm, eps)
                                 ? 1
                                 : greedy_cover(cls, dist, eps, norm).size();
            row.lower_bound = greedy_packing(cls, dist, 2.0 * eps, norm).size();
            row.exact = row.cover_size == row.lower_bound;
            row.method = "greedy-net/packing";
        }
        if (row.cover_size > members) {
            throw InvariantError("separation: cover larger than the class at eps = " + std::to_string(eps));
        }
        if (eps >= r.sup_envelope && row.cover_size != 1) {
            throw InvariantError("separation: cover size " + std::to_string(row.cover_size) +
                                 " at eps >= d/sqrt(n)");
        }
        r.covers.push_back(row);
    }
    r.cost = sketch_cost_to_unit_sigma(d, trials, rng, workers);
    r.adl_lower_bound_note =
        "ADL >= d (up to log factors) is a theoretical claim; the sketch cost is a measured upper bound "
        "for one compressor and does not certify it";
    return r;
}

void to_json(nlohmann::json& j, const EmbeddingChecks& c)
{
    j = nlohmann::json{{"orthonormality_defect", c.orthonormality_defect},
                       {"max_sup_norm", c.max_sup_norm},
                       {"isometry_defect", c.isometry_defect},
                       {"min_pairwise_sup", c.min_pairwise_sup}};
}

void to_json(nlohmann::json& j, const SeparationCoverRow& r)
{
    j = nlohmann::json{{"eps", r.eps},
                       {"cover_size", r.cover_size},
                       {"lower_bound", r.lower_bound},
                       {"exact", r.exact},
                       {"method", r.method}};
}

void to_json(nlohmann::json& j, const SketchCostPoint& p)
{
    j = nlohmann::json{{"d", p.d},
                       {"lambda_single", p.lambda_single},
                       {"k", p.k},
                       {"lambda_at_k", p.lambda_at_k},
                       {"lambda_std_err", p.lambda_std_err},
                       {"bits_per_sketch", p.bits_per_sketch},
                       {"sketch_bits_at_sigma1", p.bits_at_sigma1}};
}

void to_json(nlohmann::json& j, const SeparationReport& r)
{
    j = nlohmann::json{{"d", r.d},
                       {"alpha", r.alpha},
                       {"n", r.n},
                       {"sup_envelope", r.sup_envelope},
                       {"checks", r.checks},
                       {"covers", r.covers},
                       {"cost", r.cost},
                       {"adl_lower_bound", r.adl_lower_bound_note}};
}

} // namespace adlkit
