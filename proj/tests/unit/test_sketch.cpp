#include "adlkit/error.hpp"
#include "adlkit/linalg.hpp"
#include "adlkit/sketch.hpp"

#include "testing.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace adlkit;

namespace {

// E (x - w)(x - w)^T over the enumerated law.
Matrix law_second_moment(const std::vector<testing::LawEntry>& law, const std::vector<double>& w)
{
    const auto d = static_cast<Eigen::Index>(w.size());
    Matrix m = Matrix::Zero(d, d);
    for (const auto& e : law) {
        Vector delta = Eigen::Map<const Vector>(w.data(), d) * -1.0;
        delta(static_cast<Eigen::Index>(e.index)) += static_cast<double>(e.value);
        m += e.probability * delta * delta.transpose();
    }
    return m;
}

} // namespace

TEST_CASE("outcome law matches the enumerated definition")
{
    RandomStream rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t d = 1 + rng.below(6);
        std::vector<double> w(d);
        for (auto& x : w) {
            x = 3.0 * rng.normal();
        }
        const auto oracle = testing::sketch_law(w);
        const auto law = VectorSketcher(w).outcome_law();
        REQUIRE(law.size() == oracle.size());
        double total = 0.0;
        for (std::size_t i = 0; i < law.size(); ++i) {
            CHECK(law[i].second.index == oracle[i].index);
            CHECK(law[i].second.value == oracle[i].value);
            CHECK(law[i].first == doctest::Approx(oracle[i].probability).epsilon(1e-14));
            total += law[i].first;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("the sketch is exactly unbiased and meets the variance bound")
{
    RandomStream rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 1 + rng.below(8);
        std::vector<double> w(d);
        double sq = 0.0;
        for (auto& x : w) {
            x = rng.normal() * (rep % 5 == 0 ? 0.01 : 2.0);
            sq += x * x;
        }
        const auto law = testing::sketch_law(w);
        std::vector<double> mean(d, 0.0);
        for (const auto& e : law) {
            mean[e.index] += e.probability * static_cast<double>(e.value);
        }
        for (std::size_t i = 0; i < d; ++i) {
            CHECK(mean[i] == doctest::Approx(w[i]).epsilon(1e-12).scale(1.0));
        }
        CHECK(second_moment_top_eig(law_second_moment(law, w)) <= 0.25 + 2.0 * sq + 1e-12);
    }
}

TEST_CASE("the zero vector sketches to zero at a uniform coordinate")
{
    const std::vector<double> w(4, 0.0);
    const VectorSketcher s(w);
    for (const double p : s.probabilities()) {
        CHECK(p == 0.25);
    }
    RandomStream rng(1);
    for (int i = 0; i < 100; ++i) {
        CHECK(s.sample(rng).value == 0);
    }
}

TEST_CASE("one sketch draws exactly two uniforms")
{
    const std::vector<double> w = {0.3, -1.2, 2.0};
    RandomStream rng(3);
    (void)sketch_once(w, rng);
    CHECK(rng.draws() == 2);
}

TEST_CASE("codec worked examples")
{
    // d = 1: no index bits, gamma(1) = "1", sign "0".
    CHECK(encode_sketch({0, 0}, 1).to_string() == "10");
    // d = 4: index 2 = "10", gamma(4) = "00100", sign "1".
    CHECK(encode_sketch({2, -3}, 4).to_string() == "10001001");
    CHECK(encode_sketch({3, 1}, 5).to_string() == "0110100");
    CHECK(decode_sketch(BitString::from_string("10001001"), 4) == SketchOutcome{2, -3});
    CHECK(sketch_code_length({2, -3}, 4) == 8);
    // Negative zero, trailing bits, truncation and out-of-range indices are malformed.
    CHECK_THROWS_AS(decode_sketch(BitString::from_string("11"), 1), DecodeError);
    CHECK_THROWS_AS(decode_sketch(BitString::from_string("100"), 1), DecodeError);
    CHECK_THROWS_AS(decode_sketch(BitString::from_string("1000"), 4), DecodeError);
    CHECK_THROWS_AS(decode_sketch(BitString::from_string("111100"), 5), DecodeError);
}

TEST_CASE("codec round trips random outcomes back to back")
{
    RandomStream rng(4);
    BitString stream;
    std::vector<SketchOutcome> sent;
    for (int i = 0; i < 500; ++i) {
        const std::size_t d = 7;
        const SketchOutcome o{rng.below(d), static_cast<std::int64_t>(rng.below(2001)) - 1000};
        append_sketch(stream, o, d);
        sent.push_back(o);
    }
    BitReader r(stream);
    for (const auto& o : sent) {
        REQUIRE(read_sketch(r, 7) == o);
    }
    CHECK(r.at_end());
}

TEST_CASE("every codeword of a bounded vector fits the bits envelope")
{
    RandomStream rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 1 + rng.below(40);
        std::vector<double> w(d);
        double sq = 0.0;
        for (auto& x : w) {
            x = rng.normal();
            sq += x * x;
        }
        const double radius = std::sqrt(sq);
        for (const auto& e : testing::sketch_law(w)) {
            CHECK(static_cast<double>(sketch_code_length({e.index, e.value}, d)) <=
                  sketch_bits_envelope(d, radius));
        }
    }
}

TEST_CASE("k_sketch averages k draws")
{
    const std::vector<double> w = {1.0, 1.0};
    RandomStream rng(6);
    const auto v = k_sketch(w, 4, rng);
    // Each draw is 2 e_i, so the average has entries in {0, 0.5, ..., 2} summing to 2.
    CHECK(v[0] + v[1] == doctest::Approx(2.0));
    CHECK(rng.draws() == 8);
    CHECK_THROWS_AS(k_sketch(w, 0, rng), RangeError);
}

TEST_CASE("measured k-sketch statistics")
{
    // All-ones w: every draw is d e_i, so E[delta delta^T] = d I - 1 1^T with top eigenvalue d.
    const std::vector<double> w(4, 1.0);
    const auto r = measure_k_sketch(w, 1, 50000, RandomStream(7), 1);
    CHECK(r.lambda_max == doctest::Approx(4.0).epsilon(0.05));
    CHECK(r.bias_z_max < 5.0);
    // Each codeword: 2 index bits + gamma(5) (5 bits) + sign.
    CHECK(r.mean_bits == 8.0);
    CHECK(r.bits_std_err == 0.0);
    const auto r2 = measure_k_sketch(w, 4, 50000, RandomStream(7), 1);
    CHECK(r2.lambda_max == doctest::Approx(1.0).epsilon(0.05));
    CHECK(r2.mean_bits == 32.0);
}

TEST_CASE("measure_k_sketch is identical across worker counts")
{
    const std::vector<double> w = {0.5, -2.0, 1.5};
    const auto a = measure_k_sketch(w, 3, 20000, RandomStream(8), 1);
    const auto b = measure_k_sketch(w, 3, 20000, RandomStream(8), 4);
    CHECK(a.lambda_max == b.lambda_max);
    CHECK(a.bias_max == b.bias_max);
    CHECK(a.mean_bits == b.mean_bits);
    CHECK(a.second_moment == b.second_moment);
}
