#include <benchmark/benchmark.h>

#include "nomad/experiments.hpp"
#include "nomad/nomad.hpp"

using namespace nomad;

namespace {

DistanceMatrix population(const UndirectedGraph& g, std::uint64_t seed, double noise_max) {
    const auto k = synthesize_precision(g, seed);
    Eigen::VectorXd d(k.k.rows());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = noise_max * static_cast<double>(i % 5 + 1) / 5.0;
    return information_distances(noisy_covariance(covariance(k), d), k.labels);
}

}  // namespace

static void BM_block_decomposition(benchmark::State& state) {
    const auto g = random_connected(static_cast<int>(state.range(0)), 0.05, 7);
    for (auto _ : state) benchmark::DoNotOptimize(block_decomposition(g));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_block_decomposition)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_synthesize(benchmark::State& state) {
    const auto g = random_block(static_cast<int>(state.range(0)), 2, 3);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(synthesize_precision(g, ++seed));
}
BENCHMARK(BM_synthesize)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

// all triple pairs of the observed vertices
static void BM_tia_grid(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const auto dist = population(chain(p), 5, 2.0);
    std::vector<Triple> triples;
    for (int a = 1; a <= p; ++a)
        for (int b = a + 1; b <= p; ++b)
            for (int c = b + 1; c <= p; ++c) triples.push_back({a, b, c});
    const auto tol = Tolerances::population();
    for (auto _ : state) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < triples.size(); ++i)
            for (std::size_t j = i; j < triples.size(); ++j) hits += tia(triples[i], triples[j], dist, tol);
        benchmark::DoNotOptimize(hits);
    }
    state.counters["pairs"] = static_cast<double>(triples.size() * (triples.size() + 1) / 2);
}
BENCHMARK(BM_tia_grid)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_run_nomad_gsyn(benchmark::State& state) {
    const auto dist = population(gsyn_standin(), 11, 5.0);
    for (auto _ : state) benchmark::DoNotOptimize(run_nomad(dist));
}
BENCHMARK(BM_run_nomad_gsyn)->Unit(benchmark::kMillisecond);

static void BM_run_nomad_ieee33(benchmark::State& state) {
    const auto dist = population(ieee33_loops(), 11, 5.0);
    for (auto _ : state) benchmark::DoNotOptimize(run_nomad(dist));
}
BENCHMARK(BM_run_nomad_ieee33)->Unit(benchmark::kMillisecond);

static void BM_run_nomad_chain(benchmark::State& state) {
    const auto dist = population(chain(static_cast<int>(state.range(0))), 13, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(run_nomad(dist));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_run_nomad_chain)->DenseRange(8, 20, 4)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_empirical_distances(benchmark::State& state) {
    const auto k = synthesize_precision(gsyn_standin(), 2);
    const auto data = sample(covariance(k), static_cast<std::size_t>(state.range(0)), 9);
    for (auto _ : state) benchmark::DoNotOptimize(empirical_distances(data, k.labels));
}
BENCHMARK(BM_empirical_distances)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
