#include <benchmark/benchmark.h>

#include "cspfolio/dpll.hpp"
#include "cspfolio/encode.hpp"
#include "cspfolio/generators.hpp"

using namespace cspfolio;

namespace {

CspInstance bench_instance(int n, int d) {
    return normalize(gen_random_binary(n, d, 0.5, 0.3, 42));
}

void BM_EncodeDirect(benchmark::State& state) {
    const CspInstance inst = bench_instance(static_cast<int>(state.range(0)), 8);
    for (auto _ : state) benchmark::DoNotOptimize(encode_direct(inst, true));
}
BENCHMARK(BM_EncodeDirect)->Arg(20)->Arg(50)->Arg(100);

void BM_EncodeSupport(benchmark::State& state) {
    const CspInstance inst = bench_instance(static_cast<int>(state.range(0)), 8);
    for (auto _ : state) benchmark::DoNotOptimize(encode_support(inst, true));
}
BENCHMARK(BM_EncodeSupport)->Arg(20)->Arg(50)->Arg(100);

void BM_EncodeOrder(benchmark::State& state) {
    const CspInstance inst = bench_instance(static_cast<int>(state.range(0)), 8);
    for (auto _ : state) benchmark::DoNotOptimize(encode_order(inst, true));
}
BENCHMARK(BM_EncodeOrder)->Arg(20)->Arg(50)->Arg(100);

void BM_WriteDimacs(benchmark::State& state) {
    const CnfFormula f = encode_direct(bench_instance(static_cast<int>(state.range(0)), 8), true);
    for (auto _ : state) benchmark::DoNotOptimize(write_dimacs(f));
}
BENCHMARK(BM_WriteDimacs)->Arg(50)->Arg(100);

void BM_CountModelsPigeonhole(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const CnfFormula f = encode_direct(normalize(gen_pigeonhole(p, p - 1)), true);
    for (auto _ : state) benchmark::DoNotOptimize(count_models(f, std::uint64_t{1} << 40));
}
BENCHMARK(BM_CountModelsPigeonhole)->Arg(5)->Arg(6)->Arg(7);

} // namespace

BENCHMARK_MAIN();
