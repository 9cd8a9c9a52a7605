#include "adlkit/bitstring.hpp"
#include "adlkit/class_io.hpp"
#include "adlkit/error.hpp"
#include "adlkit/function_class.hpp"
#include "adlkit/linalg.hpp"
#include "adlkit/parallel.hpp"
#include "adlkit/random.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

using namespace adlkit;

TEST_CASE("random streams are reproducible and substreams are independent of draw count")
{
    RandomStream a(42);
    RandomStream b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    RandomStream fresh(42);
    const auto child_before = fresh.substream(3).next_u64();
    (void)fresh.next_u64();
    CHECK(fresh.substream(3).next_u64() == child_before);
    CHECK(RandomStream(42).substream(3).next_u64() != RandomStream(42).substream(4).next_u64());
    CHECK(RandomStream(42).next_u64() != RandomStream(43).next_u64());
    CHECK(RandomStream(7, {1, 2}).next_u64() == RandomStream(7).substream(1).substream(2).next_u64());
}

TEST_CASE("uniform, below and normal have the right range and moments")
{
    RandomStream r(9);
    double sum = 0.0;
    double sum_sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const auto k = r.below(7);
        REQUIRE(k < 7);
        const double z = r.normal();
        sum += z;
        sum_sq += z * z;
    }
    CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
}

TEST_CASE("fixed_width is ceil(log2 count)")
{
    CHECK(fixed_width(0) == 0);
    CHECK(fixed_width(1) == 0);
    CHECK(fixed_width(2) == 1);
    CHECK(fixed_width(3) == 2);
    CHECK(fixed_width(4) == 2);
    CHECK(fixed_width(5) == 3);
    CHECK(fixed_width(1024) == 10);
    CHECK(fixed_width(1025) == 11);
}

TEST_CASE("Elias gamma codewords")
{
    const std::pair<std::uint64_t, const char*> known[] = {{1, "1"}, {2, "010"}, {3, "011"}, {4, "00100"},
                                                           {5, "00101"}, {9, "0001001"}};
    for (const auto& [n, text] : known) {
        BitString b;
        write_gamma(b, n);
        CHECK(b.to_string() == text);
        CHECK(gamma_length(n) == b.size());
        BitReader r(b);
        CHECK(read_gamma(r) == n);
        CHECK(r.at_end());
    }
    BitString many;
    for (std::uint64_t n = 1; n < 300; ++n) {
        write_gamma(many, n);
    }
    BitReader r(many);
    for (std::uint64_t n = 1; n < 300; ++n) {
        REQUIRE(read_gamma(r) == n);
    }
    CHECK(r.at_end());
}

TEST_CASE("bit reader rejects truncation")
{
    const auto b = BitString::from_string("001");
    BitReader r(b);
    CHECK_THROWS_AS(read_gamma(r), DecodeError);
    BitReader r2(b);
    CHECK_THROWS_AS(r2.read_bits(4), DecodeError);
    CHECK_THROWS_AS(BitString::from_string("01x"), ParseError);
}

TEST_CASE("append_bits writes most significant bit first")
{
    BitString b;
    b.append_bits(5, 4);
    b.append_bits(1, 1);
    b.append_bits(7, 0);
    CHECK(b.to_string() == "01011");
    BitReader r(b);
    CHECK(r.read_bits(4) == 5);
    CHECK(r.read_bits(1) == 1);
    CHECK(r.remaining() == 0);
}

TEST_CASE("function class validates extents and values")
{
    CHECK_THROWS_AS(FiniteFunctionClass(2, 1, 1, {0.0}), InvariantError);
    CHECK_THROWS_AS(FiniteFunctionClass(1, 1, 1, {std::nan("")}), InvariantError);
    CHECK_THROWS_AS(FiniteFunctionClass(1, 1, 1, {std::numeric_limits<double>::infinity()}), InvariantError);
    const FiniteFunctionClass cls(2, 2, 2, {1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(cls.value(1, 0, 1) == 6);
    CHECK(cls.point_values(0, 1)[0] == 3);
    CHECK(cls.function(1).at(1, 1) == 8);
    const std::size_t subset[] = {1};
    const auto r = restrict(cls, subset);
    CHECK(r.num_points() == 1);
    CHECK(r.value(0, 0, 0) == 3);
    CHECK(r.value(1, 0, 1) == 8);
    const std::size_t bad[] = {0, 0};
    CHECK_THROWS_AS(restrict(cls, bad), RangeError);
    const std::size_t out_of_range[] = {2};
    CHECK_THROWS_AS(restrict(cls, out_of_range), RangeError);
    CHECK_THROWS_AS(restrict(cls, std::span<const std::size_t>{}), RangeError);
}

TEST_CASE("empirical distributions sum to one")
{
    CHECK_THROWS_AS(EmpiricalDistribution({0.5, 0.6}), InvariantError);
    CHECK_THROWS_AS(EmpiricalDistribution({-0.5, 1.5}), InvariantError);
    const auto u = EmpiricalDistribution::uniform(3);
    double total = 0.0;
    for (const double w : u.weights()) {
        total += w;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    const FiniteFunctionClass cls(1, 2, 1, {0, 0});
    CHECK_THROWS_AS(u.check_compatible(cls), InvariantError);
}

TEST_CASE("class files round trip and reject non-finite values with their index")
{
    const FiniteFunctionClass cls(2, 2, 1, {0.0, 0.25, 1.0, 0.125}, {"a", "b"});
    const EmpiricalDistribution dist({0.75, 0.25});
    const auto text = format_class_file(cls, dist);
    const auto parsed = parse_class_file(text);
    CHECK(parsed.function_class == cls);
    REQUIRE(parsed.distribution.has_value());
    CHECK(parsed.distribution->weights()[0] == 0.75);
    CHECK(format_class_file(parsed.function_class, parsed.distribution) == text);

    const std::string nan_file =
        R"({"num_hypotheses": 1, "num_points": 2, "dim": 1, "values": [[[0.5], [NaN]]]})";
    try {
        (void)parse_class_file(nan_file);
        FAIL("expected an error");
    } catch (const InvariantError& e) {
        CHECK(std::string(e.what()).find("values[0][1][0]") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_class_file(R"({"num_hypotheses": 1})"), ParseError);
    CHECK_THROWS_AS(parse_class_file(R"({"num_hypotheses": 1, "num_points": 1, "dim": 1,
        "values": [[[0]]], "colour": 1})"),
                    ParseError);
    CHECK_THROWS_AS(parse_class_file("{not json"), ParseError);
}

TEST_CASE("top eigenvalue matches a rank-one oracle")
{
    Vector v(4);
    v << 1.0, -2.0, 0.5, 3.0;
    const Matrix m = v * v.transpose();
    CHECK(second_moment_top_eig(m) == doctest::Approx(v.squaredNorm()).epsilon(1e-12));
    Matrix diag = Matrix::Zero(3, 3);
    diag.diagonal() << 0.5, 2.0, 1.0;
    CHECK(second_moment_top_eig(diag) == doctest::Approx(2.0));
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(second_moment_top_eig(asym), InvariantError);
    CHECK_THROWS_AS(second_moment_top_eig(-Matrix::Identity(2, 2)), InvariantError);
}

TEST_CASE("random orthonormal matrices have orthonormal columns")
{
    RandomStream r(5);
    const Matrix u = random_orthonormal(10, 4, r);
    CHECK(orthonormality_defect(u) < 1e-12);
    Matrix bad = u;
    bad(0, 0) += 0.1;
    CHECK(orthonormality_defect(bad) > 1e-3);
}

TEST_CASE("batch layout does not depend on workers and errors are reproducible")
{
    const auto batches = make_batches(1000, 64);
    CHECK(batches.size() == 64);
    CHECK(batches.front().begin == 0);
    CHECK(batches.back().end == 1000);
    for (std::size_t b = 1; b < batches.size(); ++b) {
        CHECK(batches[b].begin == batches[b - 1].end);
    }
    CHECK(make_batches(5, 64).size() == 5);
    const auto sum = [](const BatchRange& r) {
        double s = 0.0;
        for (std::size_t i = r.begin; i < r.end; ++i) {
            s += std::sqrt(static_cast<double>(i));
        }
        return s;
    };
    CHECK(map_batches(batches, 1, sum) == map_batches(batches, 4, sum));
    const auto failing = [](const BatchRange& r) -> int {
        if (r.index >= 10) {
            throw std::runtime_error("batch " + std::to_string(r.index));
        }
        return 0;
    };
    for (unsigned w : {1U, 3U, 8U}) {
        try {
            (void)map_batches(batches, w, failing);
            FAIL("expected an error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "batch 10");
        }
    }
}
