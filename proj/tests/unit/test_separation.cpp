#include "adlkit/error.hpp"
#include "adlkit/separation.hpp"

#include "testing.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>

using namespace adlkit;

TEST_CASE("small Hadamard matrices")
{
    const auto h0 = hadamard(0).dense();
    CHECK(h0.rows() == 1);
    CHECK(h0(0, 0) == 1.0);
    const auto h1 = hadamard(1).dense();
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(h1(0, 0) == doctest::Approx(r));
    CHECK(h1(0, 1) == doctest::Approx(r));
    CHECK(h1(1, 0) == doctest::Approx(r));
    CHECK(h1(1, 1) == doctest::Approx(-r));
    CHECK_THROWS_AS(hadamard(15), RangeError);
}

TEST_CASE("closed form matches the recursion and is orthogonal")
{
    for (unsigned n = 0; n <= 6; ++n) {
        const auto closed = hadamard(n).dense();
        const auto rec = testing::recursive_hadamard(n);
        CHECK((closed - rec).cwiseAbs().maxCoeff() <= 1e-15);
        const auto size = static_cast<Eigen::Index>(std::size_t{1} << n);
        CHECK((closed.transpose() * closed - Matrix::Identity(size, size)).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((closed.cwiseAbs().array() - std::exp2(-0.5 * n)).abs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("embedding dimension is the smallest power of two above d^(2+2/alpha)")
{
    CHECK(embedding_dimension(1, 1.0) == 1);
    CHECK(embedding_dimension(2, 1.0) == 16);
    CHECK(embedding_dimension(3, 1.0) == 128);
    CHECK(embedding_dimension(4, 1.0) == 256);
    CHECK(embedding_dimension(2, 0.5) == 64);
    CHECK_THROWS_AS(embedding_dimension(4, 0.0), RangeError);
    CHECK_THROWS_AS(embedding_dimension(4, 1.5), RangeError);
    CHECK_THROWS_AS(embedding_dimension(12, 1.0), RangeError);
}

TEST_CASE("degenerate cube d = 1")
{
    const auto e = build_embedded_cube(1, 1.0);
    CHECK(e.n == 1);
    CHECK(e.cube.num_hypotheses() == 2);
    CHECK(e.cube.value(0, 0, 0) == 1.0);
    CHECK(e.cube.value(1, 0, 0) == -1.0);
}

TEST_CASE("embedded cube d = 4: envelope and isometry by direct enumeration")
{
    const auto e = build_embedded_cube(4, 1.0);
    CHECK(e.n == 256);
    CHECK(e.cube.num_hypotheses() == 16);
    CHECK(e.cube.dim() == 256);
    CHECK(e.sup_envelope() == 0.25);
    for (std::size_t k = 0; k < 16; ++k) {
        double sup = 0.0;
        for (const double v : e.cube.hypothesis(k)) {
            sup = std::max(sup, std::abs(v));
        }
        CHECK(sup <= 0.25 + 1e-15);
        for (std::size_t l = 0; l < 16; ++l) {
            double sq = 0.0;
            for (std::size_t i = 0; i < 256; ++i) {
                const double diff = e.cube.value(k, 0, i) - e.cube.value(l, 0, i);
                sq += diff * diff;
            }
            CHECK(std::abs(std::sqrt(sq) - 2.0 * std::sqrt(std::popcount(k ^ l))) <= 1e-10);
        }
    }
    const auto checks = check_embedding(e);
    CHECK(checks.orthonormality_defect <= 1e-10);
    CHECK(checks.min_pairwise_sup == doctest::Approx(2.0 / 16.0));
    CHECK(checks.max_sup_norm == doctest::Approx(0.25));
}

TEST_CASE("separation covers")
{
    const auto r = verify_separation(4, 1.0, {0.25, 0.05, 0.01}, 5000, RandomStream(1), 1);
    REQUIRE(r.covers.size() == 3);
    CHECK(r.covers[0].cover_size == 1);
    CHECK(r.covers[1].cover_size == 16);
    CHECK(r.covers[2].cover_size == 16);
    for (const auto& row : r.covers) {
        CHECK(row.exact);
    }
    CHECK(r.adl_lower_bound_note.find("theoretical") != std::string::npos);
    // Beyond the exact guard the report pairs a greedy cover with a packing bound.
    const auto big = verify_separation(5, 1.0, {0.5, 0.01}, 2000, RandomStream(2), 1);
    CHECK(big.covers[0].cover_size == 1);
    CHECK(big.covers[1].cover_size == 32);
    CHECK(big.covers[1].lower_bound == 32);
    CHECK(big.covers[1].exact);
    CHECK_THROWS_AS(verify_separation(4, 1.0, {0.0}, 2000, RandomStream(1)), RangeError);
    CHECK_THROWS_AS(verify_separation(13, 1.0, {0.1}, 2000, RandomStream(1)), RangeError);
}

TEST_CASE("sketch cost to unit sigma grows with d")
{
    const auto curve = sketch_cost_curve({2, 4, 6, 8}, 20000, RandomStream(3), 1);
    REQUIRE(curve.size() == 4);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        // lambda of one sketch of the all-ones vector is exactly d.
        CHECK(curve[i].lambda_single == doctest::Approx(static_cast<double>(curve[i].d)).epsilon(0.05));
        CHECK(curve[i].lambda_at_k <= 1.0);
        CHECK(curve[i].k >= curve[i].d);
        if (i > 0) {
            CHECK(curve[i].bits_at_sigma1 > curve[i - 1].bits_at_sigma1);
        }
    }
    // Slope: bits per unit of d stay at least linear.
    CHECK(curve[3].bits_at_sigma1 / curve[0].bits_at_sigma1 >= 4.0);
}
