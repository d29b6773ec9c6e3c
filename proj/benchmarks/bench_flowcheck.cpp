#include <benchmark/benchmark.h>

#include "hardyscope/classify.hpp"
#include "hardyscope/flowcheck.hpp"

using namespace hardyscope;

namespace {

void BM_Santalo(benchmark::State& state) {
    const DomainSpec dom = shapes::unit_disk();
    const auto f = TangentIntegrand::basepoint("1-x^2-y^2");
    for (auto _ : state) benchmark::DoNotOptimize(santalo_compare(dom, f, state.range(0), 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Santalo)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_QuasiBoundedProbe(benchmark::State& state) {
    const DomainSpec tri = shapes::ideal_triangle(ManifoldModel::poincare_disk(1.0));
    const double eps[] = {0.2};
    QbSettings s;
    s.n_samples = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(quasibounded_probe(tri, eps, s));
}
BENCHMARK(BM_QuasiBoundedProbe)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
