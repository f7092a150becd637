#include <benchmark/benchmark.h>

#include "lmgdimer/liouville.hpp"
#include "lmgdimer/wigner.hpp"

using namespace lmgdimer;

namespace {

ModelParams dimer(int twice_s)
{
    ModelParams p;
    p.J = 1.5;
    p.lambda = 0.5;
    p.gamma = 0.5;
    p.spin = SpinLength::from_twice(twice_s);
    return p;
}

void BM_BuildLiouvillian(benchmark::State& state)
{
    const auto spec = build_dimer_model(dimer(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(build_liouvillian(spec));
}
BENCHMARK(BM_BuildLiouvillian)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

// range(0) is 2S; S = 4 is the largest supported spin.
void BM_SteadyState(benchmark::State& state)
{
    const auto L = build_liouvillian(build_dimer_model(dimer(static_cast<int>(state.range(0)))));
    for (auto _ : state) benchmark::DoNotOptimize(steady_state(L));
}
BENCHMARK(BM_SteadyState)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_WignerGrid(benchmark::State& state)
{
    const auto p = dimer(static_cast<int>(state.range(0)));
    const auto ss = steady_state(build_liouvillian(build_dimer_model(p)));
    const ComplexMatrix rho_b = partial_trace(ss.rho, Site::B, p.spin);
    for (auto _ : state) benchmark::DoNotOptimize(wigner_function(rho_b));
}
BENCHMARK(BM_WignerGrid)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
