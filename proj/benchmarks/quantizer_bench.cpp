#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ht/constrained.hpp"
#include "ht/simulate.hpp"

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

void BM_QuantizerDp(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const auto p = random_law(k, 5), q = random_law(k, 6);
    const auto obj = ht::Objective::hellinger(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(ht::optimal_quantizer_dp(p, q, 4, obj).objective);
}
BENCHMARK(BM_QuantizerDp)->RangeMultiplier(4)->Range(16, 1024);

void BM_SimulateLrt(benchmark::State& state) {
    const ht::Distribution p({0.5, 0.3, 0.2}), q({0.2, 0.3, 0.5});
    ht::SimConfig cfg;
    cfg.trials = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ht::simulate_lrt(p, q, 0.2, 20, cfg).errors);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateLrt)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
