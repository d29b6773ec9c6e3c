#include <benchmark/benchmark.h>

#include "hardyscope/hardy.hpp"

using namespace hardyscope;

namespace {

void BM_WeightSample(benchmark::State& state) {
    const DomainSpec dom = shapes::ideal_triangle(ManifoldModel::poincare_disk(1.0));
    const auto q = DirectionQuadrature::for_domain(dom, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(weight_sample(dom, {0.1, 0.05}, q));
}
BENCHMARK(BM_WeightSample)->Arg(180)->Arg(720);

void BM_WeightFieldDisk(benchmark::State& state) {
    const DomainSpec dom = shapes::unit_disk();
    const auto q = DirectionQuadrature::make(360, 40.0);
    const double h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(weight_field(dom, h, q));
}
BENCHMARK(BM_WeightFieldDisk)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_HardyReport(benchmark::State& state) {
    const DomainSpec dom = shapes::unit_disk();
    const auto field = weight_field(dom, 0.02, DirectionQuadrature::make(180, 40.0));
    const auto f = TestFunction::make("bump", "(1-x^2-y^2)^2*(1+x)", "1-x^2-y^2");
    for (auto _ : state) benchmark::DoNotOptimize(hardy_report(dom, f, field));
}
BENCHMARK(BM_HardyReport)->Unit(benchmark::kMillisecond);

void BM_Hardy1D(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(hardy_1d([](double x) { return x * (1.0 - x); }, 0.0, 1.0,
                                          static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Hardy1D)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
