#include <benchmark/benchmark.h>

#include <vector>

#include "smm/benchgen.hpp"
#include "smm/gradients.hpp"
#include "smm/isotonic.hpp"
#include "smm/model.hpp"
#include "smm/numerics.hpp"
#include "smm/rng.hpp"
#include "smm/stats.hpp"

namespace {

using namespace smm;

std::vector<double> uniform_values(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, 0);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-5.0, 5.0);
    return v;
}

Dataset task_data(std::size_t dim, std::size_t n) {
    BenchmarkSpec spec = dim == 1 ? BenchmarkSpec::univariate(TargetKind::FSqrt) : BenchmarkSpec::multivariate(dim);
    spec.n_train = n;
    spec.seed = 1;
    return make_dataset(spec).train;
}

Architecture arch_for(Variant v, std::size_t dim) {
    Architecture a;
    a.variant = v;
    a.shape = GroupShape::uniform(6, 6);
    a.mask = MonotonicityMask::all_constrained(dim);
    return a;
}

void BM_LseScaled(benchmark::State& state) {
    const auto v = uniform_values(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(lse_scaled(v, 3.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LseScaled)->Arg(6)->Arg(32)->Arg(256);

void BM_Forward(benchmark::State& state) {
    const auto variant = static_cast<Variant>(state.range(0));
    const auto dim = static_cast<std::size_t>(state.range(1));
    RngStream rng(2, 0);
    const auto p = init_params(arch_for(variant, dim), rng);
    const auto data = task_data(dim, 500);
    for (auto _ : state) benchmark::DoNotOptimize(predict(p, data));
    state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_Forward)->ArgsProduct({{static_cast<long>(Variant::MM), static_cast<long>(Variant::SMM)}, {1, 6}});

void BM_LossAndGradient(benchmark::State& state) {
    const auto variant = static_cast<Variant>(state.range(0));
    const auto dim = static_cast<std::size_t>(state.range(1));
    RngStream rng(3, 0);
    const auto p = init_params(arch_for(variant, dim), rng);
    const auto data = task_data(dim, 500);
    for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(p, data));
    state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_LossAndGradient)->ArgsProduct({{static_cast<long>(Variant::MM), static_cast<long>(Variant::SMM)}, {1, 6}});

void BM_Pava(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto xs = uniform_values(n, 4);
    const auto ys = uniform_values(n, 5);
    for (auto _ : state) benchmark::DoNotOptimize(pava_fit(xs, ys, {-5.0, 5.0}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Pava)->Range(64, 1 << 14);

void BM_Wilcoxon(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = uniform_values(n, 6);
    const auto b = uniform_values(n, 7);
    for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_paired(a, b));
}
BENCHMARK(BM_Wilcoxon)->Arg(21)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
