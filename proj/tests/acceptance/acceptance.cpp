// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero when any fails.

#include "adlkit/bitstring.hpp"
#include "adlkit/bounds.hpp"
#include "adlkit/chain.hpp"
#include "adlkit/class_io.hpp"
#include "adlkit/cli.hpp"
#include "adlkit/compressor.hpp"
#include "adlkit/cover.hpp"
#include "adlkit/separation.hpp"
#include "adlkit/sketch.hpp"

#include "testing.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#ifndef ADLKIT_TOOL_PATH
#define ADLKIT_TOOL_PATH "adlkit"
#endif

using namespace adlkit;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

FiniteFunctionClass vector_class(const std::vector<double>& w)
{
    return FiniteFunctionClass(1, 1, w.size(), w);
}

std::size_t gamma_length(std::uint64_t v)
{
    return 2 * static_cast<std::size_t>(std::bit_width(v) - 1) + 1;
}

// 1. k-sketch unbiased with lambda within its bound on random vectors.
Verdict sketch_estimator()
{
    const auto t0 = Clock::now();
    RandomStream rng(101);
    const std::size_t dims[] = {2, 8, 32};
    double worst_z = 0.0;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        const std::size_t d = dims[i % 3];
        std::vector<double> w(d);
        const double scale = 0.1 + 3.0 * rng.uniform();
        for (auto& x : w) {
            x = scale * rng.normal();
        }
        double sq = 0.0;
        for (const double x : w) {
            sq += x * x;
        }
        const auto r = measure_k_sketch(w, 1, 200000, RandomStream(102).substream(i), 1);
        worst_z = std::max(worst_z, r.bias_z_max);
        worst_ratio = std::max(worst_ratio, r.lambda_max / (0.25 + 2.0 * sq));
    }
    const double t = seconds_since(t0);
    return {worst_z <= 5.0 && worst_ratio <= 1.05 && t < 30.0,
            fmt("max bias z %.2f, max lambda/(1/4 + 2|w|^2) %.3f, %.1f s", worst_z, worst_ratio, t)};
}

// 2. Sketch of (1, 1): (0, 2) and (1, 2) with probability 1/2 each.
Verdict two_point_law()
{
    const std::vector<double> w = {1.0, 1.0};
    const auto law = testing::sketch_law(w);
    const std::size_t n = 100000;
    std::size_t first = 0;
    std::size_t other = 0;
    RandomStream rng(201);
    for (std::size_t t = 0; t < n; ++t) {
        const auto o = sketch_once(w, rng);
        if (o.value != 2) {
            ++other;
        } else if (o.index == 0) {
            ++first;
        }
    }
    const bool law_ok = law.size() == 2 && law[0].value == 2 && law[1].value == 2 &&
                        law[0].probability == 0.5 && law[1].probability == 0.5;
    const double sd = std::sqrt(n * 0.25);
    const double z = std::abs(static_cast<double>(first) - 0.5 * n) / sd;
    return {law_ok && other == 0 && z <= 4.0,
            fmt("index 0 in %zu of %zu draws (z = %.2f), other values %zu", first, n, z, other)};
}

// 3. Amplification by 4 copies: lambda / 4, concatenated codewords, 4x bits.
Verdict amplification()
{
    const std::vector<double> w = {1.2, -0.7, 0.3, 2.1};
    const auto cls = vector_class(w);
    const auto dist = EmpiricalDistribution::uniform(1);
    const auto base = sketch_compressor(4, 1);
    const auto amp = amplify(base, 0.5);
    const auto rb = verify_estimator(*base, cls, dist, 0, 100000, RandomStream(301), 1);
    const auto ra = verify_estimator(*amp, cls, dist, 0, 100000, RandomStream(302), 1);
    const double ratio = ra.lambda_max / rb.lambda_max;

    bool concat = true;
    for (std::uint64_t t = 0; t < 200 && concat; ++t) {
        RandomStream r = RandomStream(303).substream(t);
        const auto joined = amp->encode(r, cls, 0);
        BitString expected;
        for (std::uint64_t i = 0; i < 4; ++i) {
            RandomStream copy = RandomStream(303).substream(t).substream(i);
            expected.append(base->encode(copy, cls, 0));
        }
        concat = joined == expected;
    }

    double exact_bits = 0.0;
    for (const auto& e : testing::sketch_law(w)) {
        const auto mag = static_cast<std::uint64_t>(e.value < 0 ? -e.value : e.value);
        exact_bits += e.probability * static_cast<double>(fixed_width(4) + gamma_length(mag + 1) + 1);
    }
    const double bits_z = std::abs(ra.mean_bits - 4.0 * exact_bits) / ra.bits_std_err;
    return {std::abs(ratio - 0.25) <= 0.025 && concat && bits_z <= 5.0,
            fmt("lambda ratio %.4f, concatenation %s, bits %.3f vs exact %.3f (z = %.2f)", ratio,
                concat ? "exact" : "differs", ra.mean_bits, 4.0 * exact_bits, bits_z)};
}

// 4. Median of k copies: P(|median - h| >= t sigma) <= (2/t)^k.
Verdict median_tail()
{
    const auto cls = vector_class({0.0});
    const auto gauss = std::make_shared<testing::GaussianCompressor>(1, 1);
    const std::size_t n = 100000;
    double worst = -1.0;
    bool ok = true;
    for (const std::size_t k : {3, 5, 7}) {
        const auto med = median_boost(gauss, k);
        std::vector<double> values(n);
        for (std::size_t t = 0; t < n; ++t) {
            RandomStream r = RandomStream(401).substream(k).substream(t);
            values[t] = med->decode(med->encode(r, cls, 0)).at(0, 0);
        }
        for (const double tau : {3.0, 4.0, 6.0}) {
            std::size_t hits = 0;
            for (const double v : values) {
                hits += std::abs(v) >= tau;
            }
            const double p = static_cast<double>(hits) / n;
            const double bound = std::pow(2.0 / tau, static_cast<double>(k));
            const double slack = p + 3.0 * std::sqrt(p * (1.0 - p) / n);
            ok = ok && p <= bound + 3.0 * std::sqrt(p * (1.0 - p) / n);
            worst = std::max(worst, slack - bound);
        }
    }
    return {ok, fmt("max (p_hat + 3 se) - (2/t)^k = %.3g over k in {3,5,7}, t in {3,4,6}", worst)};
}

// 5. Chain compressor by outcome enumeration.
Verdict chain_exact()
{
    RandomStream rng(501);
    double worst_bias = 0.0;
    double worst_bits = 0.0;
    double worst_margin = -1e300;
    for (std::size_t i = 0; i < 40; ++i) {
        const std::size_t hyps = 1 + rng.below(8);
        const std::size_t points = 1 + rng.below(4);
        const double a = i % 2 ? 1.0 : 0.5;
        const auto cls = testing::random_class(rng, hyps, points, 1);
        const auto dist = EmpiricalDistribution::uniform(points);
        const auto c =
            build_chain_compressor(build_cover_chain(cls, dist, NormSpec{InnerNorm::sup}, true), a);
        const auto& chain = c->chain();
        // b_n from the cover sizes directly.
        double expected_bits = 0.0;
        double qsum = 0.0;
        for (std::size_t n = 1; n <= chain.n_max; ++n) {
            const double q = std::exp2(-static_cast<double>(n) * (2.0 - a / 2.0));
            qsum += q;
            const double b = static_cast<double>(gamma_length(n + 1) + fixed_width(chain.covers[n].size()) +
                                                 fixed_width(chain.covers[n - 1].size()));
            expected_bits += q * b;
        }
        expected_bits += 1.0 - qsum;
        const double bound = chain_variance_bound(chain.n_max, a);
        for (std::size_t h = 0; h < hyps; ++h) {
            double bits = 0.0;
            std::vector<double> mean(points, 0.0);
            double second = 0.0;
            for (const auto& o : c->outcomes(h)) {
                bits += o.probability * static_cast<double>(o.codeword.size());
                for (std::size_t x = 0; x < points; ++x) {
                    const double v = o.value.at(x, 0);
                    mean[x] += o.probability * v;
                    second += o.probability * dist[x] * (v - cls.value(h, x, 0)) * (v - cls.value(h, x, 0));
                }
            }
            for (std::size_t x = 0; x < points; ++x) {
                worst_bias = std::max(worst_bias, std::abs(mean[x] - cls.value(h, x, 0)));
            }
            worst_bits = std::max(worst_bits, std::abs(bits - expected_bits));
            worst_margin = std::max(worst_margin, second - bound);
        }
    }
    return {worst_bias <= 1e-12 && worst_bits <= 1e-12 && worst_margin <= 0.0,
            fmt("max bias %.2e, max |bits - sum q_n b_n| %.2e, max lambda - bound %.3f", worst_bias, worst_bits,
                worst_margin)};
}

// 6. Exact covers against brute force; VC dimension of two classes.
Verdict covers_and_vc()
{
    RandomStream rng(601);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < 30; ++i) {
        const std::size_t hyps = 2 + rng.below(9);
        const auto cls = testing::random_grid_class(rng, hyps, 3, 2, 4);
        const auto dist = EmpiricalDistribution::uniform(3);
        const bool sup = i % 2 == 0;
        const double eps = 0.1 + 0.5 * rng.uniform();
        const auto got = exact_cover(cls, dist, eps, NormSpec{sup ? InnerNorm::sup : InnerNorm::euclidean});
        mismatches += got.size() != testing::brute_force_cover_size(cls, cls, dist, eps, sup);
    }
    const std::size_t thresholds = vc_dimension(threshold_class(10));
    std::vector<double> all;
    for (unsigned s = 0; s < 16; ++s) {
        for (unsigned x = 0; x < 4; ++x) {
            all.push_back((s >> x) & 1U);
        }
    }
    const std::size_t full = vc_dimension(FiniteFunctionClass(16, 4, 1, all));
    return {mismatches == 0 && thresholds == 1 && full == 4,
            fmt("%zu of 30 cover sizes differ from brute force; VC thresholds %zu, all labelings %zu", mismatches,
                thresholds, full)};
}

// 7. Hadamard-embedded cube at d = 4.
Verdict separation_d4()
{
    const auto t0 = Clock::now();
    const auto e = build_embedded_cube(4, 1.0);
    double sup = 0.0;
    double iso = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
        for (const double v : e.cube.hypothesis(k)) {
            sup = std::max(sup, std::abs(v));
        }
        for (std::size_t l = 0; l < 16; ++l) {
            double sq = 0.0;
            for (std::size_t i = 0; i < e.n; ++i) {
                const double diff = e.cube.value(k, 0, i) - e.cube.value(l, 0, i);
                sq += diff * diff;
            }
            iso = std::max(iso, std::abs(std::sqrt(sq) - 2.0 * std::sqrt(std::popcount(k ^ l))));
        }
    }
    const auto r = verify_separation(4, 1.0, {0.25, 0.05}, 20000, RandomStream(701), 1);
    const double t = seconds_since(t0);
    const bool ok = e.n == 256 && sup <= 0.25 + 1e-15 && iso <= 1e-10 && r.covers[0].cover_size == 1 &&
                    r.covers[1].cover_size == 16 && r.covers[0].exact && r.covers[1].exact && t < 10.0;
    return {ok, fmt("n = %zu, max sup %.4f, isometry defect %.1e, N(0.25) = %zu, N(0.05) = %zu, %.2f s", e.n, sup, iso,
                    r.covers[0].cover_size, r.covers[1].cover_size, t)};
}

// 8. Transport through the embedding keeps codewords and lambda.
Verdict transport_identity()
{
    const auto e = build_embedded_cube(4, 1.0);
    const auto base = sketch_compressor(4, 1);
    const auto moved = transport(base, e.a);
    bool identical = true;
    for (std::size_t h = 0; h < 16 && identical; ++h) {
        for (std::uint64_t t = 0; t < 200 && identical; ++t) {
            RandomStream a = RandomStream(801).substream(t);
            RandomStream b = RandomStream(801).substream(t);
            identical = base->encode(a, e.raw_cube, h) == moved->encode(b, e.cube, h);
        }
    }
    const auto dist = EmpiricalDistribution::uniform(1);
    const auto r1 = verify_estimator(*base, e.raw_cube, dist, 0, 20000, RandomStream(802), 1);
    const auto r2 = verify_estimator(*moved, e.cube, dist, 0, 20000, RandomStream(803), 1);
    const double tol = 3.0 * std::hypot(r1.lambda_std_err, r2.lambda_std_err);
    const double gap = std::abs(r1.lambda_max - r2.lambda_max);
    return {identical && gap <= tol,
            fmt("codewords %s; lambda cube %.4f, embedded %.4f, |diff| %.4f <= %.4f", identical ? "identical" : "differ",
                r1.lambda_max, r2.lambda_max, gap, tol)};
}

// 9. Coin class: representativeness against enumeration over 2^m samples.
Verdict coin_rep()
{
    const FiniteFunctionClass coin(2, 1, 1, {0.0, 1.0});
    const JointDistribution joint({{0, {0.0}, 0.5}, {0, {1.0}, 0.5}});
    const std::size_t m = 5;
    double exact = 0.0;
    for (unsigned s = 0; s < 32; ++s) {
        const double ones = std::popcount(s);
        // l_S(h=0) = ones/m, l_S(h=1) = 1 - ones/m; l_D = 1/2 for both.
        exact += std::max(0.5 - ones / m, 0.5 - (m - ones) / m) / 32.0;
    }
    const auto r = rep_estimate(coin, joint, LossSpec::absolute_clipped(1.0), m, 100000, RandomStream(901), 1);
    const double gap = std::abs(r.mean_rep - exact);
    return {gap <= 3.0 * r.std_err,
            fmt("measured %.5f, enumerated %.5f, |diff| %.5f <= %.5f", r.mean_rep, exact, gap, 3.0 * r.std_err)};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 10. Reports are byte-identical for a seed, whatever the worker count.
Verdict determinism()
{
    const auto dir = std::filesystem::temp_directory_path();
    const auto input = dir / "adlkit_acceptance_class.json";
    const auto binary = dir / "adlkit_acceptance_binary.json";
    RandomStream rng(1001);
    save_class(input, testing::random_class(rng, 8, 3, 2, 0.0, 0.7));
    save_class(binary, threshold_class(6));

    std::vector<cli::RunConfig> configs;
    for (const char* cmd : {"sketch-verify", "ball", "cover", "vc", "chain", "separation", "repbound"}) {
        cli::RunConfig c;
        c.command = cmd;
        c.seed = 17;
        c.trials = 2000;
        c.d = 4;
        if (c.command == "cover" || c.command == "chain") {
            c.input_path = input.string();
        } else if (c.command == "vc") {
            c.input_path = binary.string();
        } else if (c.command == "repbound") {
            c.m = {10, 20};
            c.trials = 400;
        }
        configs.push_back(c);
    }
    std::size_t same = 0;
    for (auto c : configs) {
        c.workers = 1;
        const auto a = cli::render_report(c).text;
        const auto b = cli::render_report(c).text;
        c.workers = 4;
        const auto d = cli::render_report(c).text;
        c.format = "csv";
        const auto e = cli::render_report(c).text;
        c.workers = 1;
        same += a == b && a == d && e == cli::render_report(c).text;
    }

    const auto out1 = dir / "adlkit_acceptance_w1.json";
    const auto out4 = dir / "adlkit_acceptance_w4.json";
    const std::string tool = ADLKIT_TOOL_PATH;
    const std::string base = "\"" + tool + "\" chain --input \"" + input.string() + "\" --seed 5 --trials 3000 --workers ";
    const int s1 = std::system((base + "1 --output \"" + out1.string() + "\"").c_str());
    const int s4 = std::system((base + "4 --output \"" + out4.string() + "\"").c_str());
    const bool proc = s1 == 0 && s4 == 0 && !slurp(out1).empty() && slurp(out1) == slurp(out4);
    return {same == configs.size() && proc,
            fmt("%zu of %zu commands identical across runs and workers; subprocess outputs %s", same, configs.size(),
                proc ? "identical" : "differ")};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"sketch estimator on random vectors", sketch_estimator},
        {"two-point sketch law", two_point_law},
        {"amplification", amplification},
        {"median tail bound", median_tail},
        {"chain compressor exact moments", chain_exact},
        {"exact covers and VC dimension", covers_and_vc},
        {"embedded cube d = 4", separation_d4},
        {"transport through the embedding", transport_identity},
        {"coin class representativeness", coin_rep},
        {"deterministic reports", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ' ' << criteria[i].first << ": " << v.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
