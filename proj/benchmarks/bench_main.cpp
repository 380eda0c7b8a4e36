#include <benchmark/benchmark.h>

#include <vector>

#include "ibdl/boundary.hpp"
#include "ibdl/coupling.hpp"
#include "ibdl/fluid_solvers.hpp"
#include "ibdl/fourier.hpp"
#include "ibdl/reference.hpp"
#include "ibdl/scalar_solvers.hpp"

using namespace ibdl;

namespace {

ImmersedBoundary unit_circle(const PeriodicGrid& g) {
    return discretize(ShapeSpec{Circle{{0.0, 0.0}, 0.25}, Orientation::InteriorIsOmega}, g, 0.75);
}

void BM_Spread(benchmark::State& state) {
    const PeriodicGrid g(static_cast<int>(state.range(0)), 1.0);
    const Coupler c(unit_circle(g), g, CouplingKernel{});
    const std::vector<double> F(c.size(), 1.0);
    ScalarField out(g);
    for (auto _ : state) {
        out.values.assign(out.values.size(), 0.0);
        c.spread_into(F, out);
        benchmark::DoNotOptimize(out.values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(c.size()));
}
BENCHMARK(BM_Spread)->Arg(256)->Arg(1024);

void BM_Interpolate(benchmark::State& state) {
    const PeriodicGrid g(static_cast<int>(state.range(0)), 1.0);
    const Coupler c(unit_circle(g), g, CouplingKernel{});
    const ScalarField u = sample(g, [](double x, double y) { return x * y; });
    for (auto _ : state) benchmark::DoNotOptimize(c.interpolate(u));
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(c.size()));
}
BENCHMARK(BM_Interpolate)->Arg(256)->Arg(1024);

void BM_ForwardFFT(benchmark::State& state) {
    const PeriodicGrid g(static_cast<int>(state.range(0)), 1.0);
    const ScalarField u = sample(g, [](double x, double y) { return x - y; });
    for (auto _ : state) benchmark::DoNotOptimize(fft(u));
}
BENCHMARK(BM_ForwardFFT)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_InverseFFT(benchmark::State& state) {
    const PeriodicGrid g(static_cast<int>(state.range(0)), 1.0);
    const Spectrum s = fft(sample(g, [](double x, double y) { return x - y; }));
    for (auto _ : state) benchmark::DoNotOptimize(ifft(s, g));
}
BENCHMARK(BM_InverseFFT)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

// One application of the double-layer boundary operator the Krylov solver sees.
void BM_ScalarSchurApply(benchmark::State& state) {
    const PeriodicGrid g(static_cast<int>(state.range(0)), 1.0);
    ScalarProblem p(g);
    p.boundary = unit_circle(g);
    p.k2 = 1.0;
    const LinearOperator op = ibdl_scalar_operator(p);
    const std::vector<double> x(op.dimension, 1.0);
    std::vector<double> y(op.dimension);
    for (auto _ : state) {
        op.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_ScalarSchurApply)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_FluidSchurApply(benchmark::State& state) {
    const PeriodicGrid g(static_cast<int>(state.range(0)), 1.0);
    FluidProblem p(g);
    p.boundary = unit_circle(g);
    p.k2 = 1.0;
    p.ub_x.assign(p.boundary.size(), 0.0);
    p.ub_y.assign(p.boundary.size(), 0.0);
    const LinearOperator op = ibdl_fluid_operator(p);
    const std::vector<double> x(op.dimension, 1.0);
    std::vector<double> y(op.dimension);
    for (auto _ : state) {
        op.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_FluidSchurApply)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
