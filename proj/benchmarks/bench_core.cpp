#include "ican/datagen.hpp"
#include "ican/dependence.hpp"
#include "ican/gp.hpp"
#include "ican/projection.hpp"

#include <benchmark/benchmark.h>

namespace {

ican::PairedSample make_sample(int n) {
    return ican::normalize(ican::gen_dataset1(n, 17).sample);
}

void BM_HsicBiased(benchmark::State& state) {
    const auto data = make_sample(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(ican::hsic_biased(data.x, data.y));
}
BENCHMARK(BM_HsicBiased)->Arg(100)->Arg(200)->Arg(400);

void BM_HsicGammaPValue(benchmark::State& state) {
    const auto data = make_sample(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(ican::hsic_pvalue(data.x, data.y));
}
BENCHMARK(BM_HsicGammaPValue)->Arg(100)->Arg(200);

void BM_FitGp(benchmark::State& state) {
    const auto g = ican::gen_dataset1(static_cast<int>(state.range(0)), 17);
    for (auto _ : state)
        benchmark::DoNotOptimize(ican::fit_gp(g.truth.t, g.sample.x, 1));
}
BENCHMARK(BM_FitGp)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_DependenceObjective(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto g = ican::gen_dataset1(n, 17);
    const auto data = ican::normalize(g.sample);
    const auto fit = ican::principal_curve_fit(data, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            ican::dependence_objective(fit.latents.values, fit.curve.path, data));
}
BENCHMARK(BM_DependenceObjective)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
