#include <benchmark/benchmark.h>

#include "lmgdimer/meanfield.hpp"

using namespace lmgdimer;

namespace {

ModelParams point(double J, double lambda)
{
    ModelParams p;
    p.J = J;
    p.lambda = lambda;
    p.gamma = 0.5;
    return p;
}

void BM_Rhs(benchmark::State& state)
{
    const auto p = point(-1.5, 0.9);
    const BlochPair s(0.6, 0.0, -0.8, 0.6, 0.0, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(mf_rhs(s, p));
}
BENCHMARK(BM_Rhs);

void BM_Integrate(benchmark::State& state)
{
    const auto p = point(-1.5, 0.9);
    const BlochPair s(0.6, 0.0, -0.8, 0.6, 0.0, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(integrate(s, p, static_cast<double>(state.range(0))));
}
BENCHMARK(BM_Integrate)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Lyapunov(benchmark::State& state)
{
    const auto p = point(-1.5, 0.9);
    const BlochPair s(0.6, 0.0, -0.8, 0.6, 0.0, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(lyapunov_estimate(p, s, 1000.0));
}
BENCHMARK(BM_Lyapunov)->Unit(benchmark::kMillisecond);

// Cells of the three kinds: one fixed point, a Z2 pair, no fixed point.
void BM_Classify(benchmark::State& state)
{
    const double cells[3][2] = {{0.0, 0.25}, {1.5, 0.1}, {-1.5, 0.9}};
    const auto p = point(cells[state.range(0)][0], cells[state.range(0)][1]);
    for (auto _ : state) benchmark::DoNotOptimize(classify_point(p));
}
BENCHMARK(BM_Classify)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
