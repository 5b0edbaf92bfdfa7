// Hot paths: superoperator assembly, the dense null-space solve that
// dominates sweeps, RK4 stepping, and the per-cell observable pass.

#include <benchmark/benchmark.h>

#include <cstdlib>

#include "lmg/liouvillian.hpp"
#include "lmg/mean_field.hpp"
#include "lmg/model.hpp"
#include "lmg/observables.hpp"
#include "lmg/spin_ops.hpp"
#include "lmg/steady.hpp"

using namespace lmg;

namespace {

ModelParams params_at(int n, double theta_x) {
    ModelParams p;
    p.n_spins = n;
    p.h = 1.0;
    p.gamma_x = 1.2;
    p.kappa = 0.05;
    p.theta_x = theta_x;
    return p;
}

void BM_BuildLiouvillian(benchmark::State& state) {
    const int n = int(state.range(0));
    Basis b = build_basis(n);
    ModelParams p = params_at(n, 2.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_liouvillian(p, b, true));
    }
}
BENCHMARK(BM_BuildLiouvillian)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_SteadyStateDense(benchmark::State& state) {
    const int n = int(state.range(0));
    Basis b = build_basis(n);
    SuperOperator l = build_liouvillian(params_at(n, 2.0), b, true);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_steady_state(l));
    }
}
BENCHMARK(BM_SteadyStateDense)
    ->Arg(10)
    ->Arg(20)
    ->Arg(30)
    ->Unit(benchmark::kMillisecond);

void BM_SteadyStateSparse(benchmark::State& state) {
    const int n = int(state.range(0));
    Basis b = build_basis(n);
    SuperOperator l = build_liouvillian(params_at(n, 0.0), b, true);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_steady_state(l));
    }
}
BENCHMARK(BM_SteadyStateSparse)->Arg(70)->Unit(benchmark::kMillisecond);

void BM_EvolveStep(benchmark::State& state) {
    const int n = int(state.range(0));
    Basis b = build_basis(n);
    SuperOperator l = build_liouvillian(params_at(n, 2.0), b, true);
    DensityMatrix rho = DensityMatrix::Identity(b.dim, b.dim) / double(b.dim);
    const double dt = 0.1 / l.norm_bound();
    for (auto _ : state) {
        rho = evolve(rho, l, 100.0 * dt, dt);
        benchmark::DoNotOptimize(rho);
    }
}
BENCHMARK(BM_EvolveStep)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Observables(benchmark::State& state) {
    const int n = int(state.range(0));
    Basis b = build_basis(n);
    SuperOperator l = build_liouvillian(params_at(n, 2.0), b, true);
    DensityMatrix rho = solve_steady_state(l).rho;
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_observables(rho, b));
    }
}
BENCHMARK(BM_Observables)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_BifurcationScan(benchmark::State& state) {
    ModelParams p = params_at(2, 0.0);
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(0.5 + 0.05 * k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mf_bifurcation_scan(p, grid));
    }
}
BENCHMARK(BM_BifurcationScan)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    setenv("OMP_NUM_THREADS", "1", 0);
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
