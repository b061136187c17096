// Timings of the hot kernels, serial reference vs. the OpenMP path.

#include <benchmark/benchmark.h>

#include "rhd/cases.hpp"

using namespace rhd;

namespace {

struct Setup3 {
    Case<3> cas = cases::sine3d();
    SolverOptions<3> opt;
    Solution<3> sol;
    Workspace<3> ws;

    explicit Setup3(int n)
        : sol(initialize(cas, Index<3>{n, n, n}, cas.adapt, 2)), ws(sol.mesh.ncells)
    {
        opt.bc = cas.bc;
        opt.adapt = cas.adapt;
        fill_ghost_prims(sol.prim, opt.bc);
        compute_spatial_metrics(sol.mesh.x, sol.mesh.dxi, ws.metrics, Exec::serial);
        set_face_velocity_temporal(sol.mesh.x, sol.mesh.xdot, ws.metrics, Exec::serial);
    }
};

void bm_rhs(benchmark::State& state, Exec ex)
{
    Setup3 s(static_cast<int>(state.range(0)));
    s.opt.exec = ex;
    for (auto _ : state) {
        compute_rhs(s.sol.prim, s.sol.mesh.dxi, s.opt, s.ws, s.ws.dju, s.ws.djac);
        benchmark::DoNotOptimize(s.ws.dju.data());
    }
    state.SetItemsProcessed(state.iterations() * s.sol.jac.size());
}

void bm_metrics(benchmark::State& state, Exec ex)
{
    Setup3 s(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        compute_spatial_metrics(s.sol.mesh.x, s.sol.mesh.dxi, s.ws.metrics, ex);
        benchmark::DoNotOptimize(s.ws.metrics.face[0].data());
    }
    state.SetItemsProcessed(state.iterations() * s.sol.jac.size());
}

void bm_recover(benchmark::State& state, Exec ex)
{
    Setup3 s(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        recover_prims(s.sol.ju, s.sol.jac, s.opt.gas, s.sol.prim, ex);
        benchmark::DoNotOptimize(s.sol.prim.data());
    }
    state.SetItemsProcessed(state.iterations() * s.sol.jac.size());
}

} // namespace

BENCHMARK_CAPTURE(bm_rhs, serial, Exec::serial)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(bm_rhs, parallel, Exec::parallel)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(bm_metrics, serial, Exec::serial)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(bm_metrics, parallel, Exec::parallel)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(bm_recover, serial, Exec::serial)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(bm_recover, parallel, Exec::parallel)->Arg(16)->Arg(32);

BENCHMARK_MAIN();
