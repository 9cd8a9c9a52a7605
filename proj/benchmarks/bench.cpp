#include "adlkit/chain.hpp"
#include "adlkit/cover.hpp"
#include "adlkit/separation.hpp"
#include "adlkit/sketch.hpp"

#include <benchmark/benchmark.h>

using namespace adlkit;

namespace {

std::vector<double> random_vector(std::size_t d, std::uint64_t seed)
{
    RandomStream rng(seed);
    std::vector<double> w(d);
    for (auto& x : w) {
        x = rng.normal();
    }
    return w;
}

FiniteFunctionClass random_class(std::size_t hyps, std::size_t points, std::size_t dim, std::uint64_t seed)
{
    RandomStream rng(seed);
    std::vector<double> v(hyps * points * dim);
    for (auto& x : v) {
        x = rng.uniform();
    }
    return FiniteFunctionClass(hyps, points, dim, std::move(v));
}

void BM_SketchOnce(benchmark::State& state)
{
    const auto w = random_vector(static_cast<std::size_t>(state.range(0)), 1);
    RandomStream rng(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sketch_once(w, rng));
    }
}
BENCHMARK(BM_SketchOnce)->Arg(8)->Arg(256)->Arg(4096);

void BM_SketchCodec(benchmark::State& state)
{
    const std::size_t d = 1024;
    const SketchOutcome o{517, -37};
    for (auto _ : state) {
        const auto bits = encode_sketch(o, d);
        benchmark::DoNotOptimize(decode_sketch(bits, d));
    }
}
BENCHMARK(BM_SketchCodec);

void BM_MeasureKSketch(benchmark::State& state)
{
    const auto w = random_vector(32, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(measure_k_sketch(w, 4, 10000, RandomStream(4), 1));
    }
}
BENCHMARK(BM_MeasureKSketch)->Unit(benchmark::kMillisecond);

void BM_DistanceMatrix(benchmark::State& state)
{
    const auto cls = random_class(static_cast<std::size_t>(state.range(0)), 16, 4, 5);
    const auto dist = EmpiricalDistribution::uniform(16);
    for (auto _ : state) {
        DistanceMatrix dm(cls, dist, NormSpec{InnerNorm::sup}, 1);
        benchmark::DoNotOptimize(dm.diameter());
    }
}
BENCHMARK(BM_DistanceMatrix)->Arg(64)->Arg(512);

void BM_ExactCover(benchmark::State& state)
{
    const auto cls = random_class(static_cast<std::size_t>(state.range(0)), 4, 1, 6);
    const auto dist = EmpiricalDistribution::uniform(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_cover(cls, dist, 0.3, NormSpec{InnerNorm::sup}));
    }
}
BENCHMARK(BM_ExactCover)->Arg(12)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_ChainEncode(benchmark::State& state)
{
    const auto cls = random_class(64, 8, 1, 7);
    const auto c = build_chain_compressor(
        build_cover_chain(cls, EmpiricalDistribution::uniform(8), NormSpec{InnerNorm::sup}, false), 0.5);
    const auto enc = c->bind(cls);
    RandomStream rng(8);
    std::size_t h = 0;
    for (auto _ : state) {
        BitString out;
        enc->encode(rng, h++ % 64, out);
        benchmark::DoNotOptimize(out.size());
    }
}
BENCHMARK(BM_ChainEncode);

void BM_HadamardColumns(benchmark::State& state)
{
    const HadamardMatrix h(static_cast<unsigned>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(h.columns(8));
    }
}
BENCHMARK(BM_HadamardColumns)->Arg(8)->Arg(12);

} // namespace

BENCHMARK_MAIN();
