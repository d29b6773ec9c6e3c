#include <benchmark/benchmark.h>

#include "hardyscope/spectrum.hpp"

using namespace hardyscope;

namespace {

void BM_AssemblePencil(benchmark::State& state) {
    const DomainSpec dom = shapes::ideal_triangle(ManifoldModel::poincare_disk(1.0));
    const double h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_pencil(dom, h));
}
BENCHMARK(BM_AssemblePencil)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_LowestEigenvalues(benchmark::State& state) {
    const auto disc = assemble_pencil(shapes::unit_square(), 1.0 / static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(lowest_eigenvalues(disc.pencil, 3));
}
BENCHMARK(BM_LowestEigenvalues)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TruncationStudy(benchmark::State& state) {
    const DomainSpec tri = shapes::ideal_triangle(ManifoldModel::poincare_disk(1.0));
    const double cuts[] = {0.5, 0.35355339059327373, 0.25};
    for (auto _ : state) benchmark::DoNotOptimize(truncation_study(tri, cuts, 1.0 / 64, 3));
}
BENCHMARK(BM_TruncationStudy)->Unit(benchmark::kMillisecond);

}  // namespace
