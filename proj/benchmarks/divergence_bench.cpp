#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ht/divergences.hpp"
#include "ht/inequality_lab.hpp"

namespace {

ht::Distribution random_law(std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> v(k);
    double s = 0;
    for (double& x : v) s += (x = e(rng));
    for (double& x : v) x /= s;
    return ht::Distribution(std::move(v));
}

void BM_JsAlpha(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const auto p = random_law(k, 1), q = random_law(k, 2);
    for (auto _ : state) benchmark::DoNotOptimize(ht::js_alpha(p, q, 0.01));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_JsAlpha)->Range(8, 8192);

void BM_HLambda(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const auto p = random_law(k, 3), q = random_law(k, 4);
    for (auto _ : state) benchmark::DoNotOptimize(ht::h_lambda(p, q, 0.3));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HLambda)->Range(8, 8192);

void BM_InequalityGrid(benchmark::State& state) {
    ht::InequalityGrid g;
    g.resolution = static_cast<std::size_t>(state.range(0));
    g.corner_points = 8;
    g.alphas = ht::dyadic_alphas(4);
    for (auto _ : state) benchmark::DoNotOptimize(ht::check_js_h_inequality(g).violations);
}
BENCHMARK(BM_InequalityGrid)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
