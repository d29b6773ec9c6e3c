#include <benchmark/benchmark.h>

#include "hardyscope/domain.hpp"
#include "hardyscope/expr.hpp"

using namespace hardyscope;

namespace {

DomainSpec domain_for(int which) {
    switch (which) {
        case 0: return shapes::unit_disk();
        case 1: return shapes::unit_square();
        default: return shapes::ideal_triangle(ManifoldModel::poincare_disk(1.0));
    }
}

void BM_CastClosedForm(benchmark::State& state) {
    const DomainSpec dom = domain_for(static_cast<int>(state.range(0)));
    const RayCaster caster(dom, {0.05, 0.1});
    double theta = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(caster.cast(theta, 40.0));
        theta += 0.01;
    }
}
BENCHMARK(BM_CastClosedForm)->Arg(0)->Arg(1)->Arg(2);

void BM_CastMarch(benchmark::State& state) {
    const DomainSpec dom = domain_for(static_cast<int>(state.range(0)));
    const RayCaster caster(dom, {0.05, 0.1}, {CastMethod::march, {}});
    double theta = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(caster.cast(theta, 40.0));
        theta += 0.01;
    }
}
BENCHMARK(BM_CastMarch)->Arg(0)->Arg(2);

void BM_CastCustomModel(benchmark::State& state) {
    const auto model = ManifoldModel::custom_conformal("2*2^(-(1+x)/2)/(1-x^2-y^2)", Chart::disk(1.0));
    const DomainSpec dom = shapes::ideal_triangle(model);
    const RayCaster caster(dom, {0.05, 0.1});
    double theta = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(caster.cast(theta, 40.0));
        theta += 0.01;
    }
}
BENCHMARK(BM_CastCustomModel);

void BM_BoundaryDistance(benchmark::State& state) {
    const DomainSpec dom = domain_for(static_cast<int>(state.range(0)));
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(boundary_distance(dom, {0.1 * std::sin(x), 0.1 * std::cos(x) + 0.2}));
        x += 0.01;
    }
}
BENCHMARK(BM_BoundaryDistance)->Arg(0)->Arg(2);

void BM_ExpressionEval(benchmark::State& state) {
    const Expression e = Expression::parse("2*2^(-(1+x)/2)/(1-x^2-y^2)", {"x", "y"});
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(e(0.3 * std::sin(x), 0.2));
        x += 0.01;
    }
}
BENCHMARK(BM_ExpressionEval);

}  // namespace
