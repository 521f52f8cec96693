#include <benchmark/benchmark.h>

#include "ringtheta/detfunc.hpp"
#include "ringtheta/dynamics.hpp"
#include "ringtheta/labframe.hpp"
#include "ringtheta/spectral.hpp"

using namespace ringtheta;

namespace {

ModelParams ring(int ns) {
  ModelParams p;
  p.n = 2;
  p.n_sites = ns;
  p.omega = 2.0;
  return p;
}

}  // namespace

static void BM_Eigendecompose(benchmark::State& st) {
  auto h = build_ring_hamiltonian(ring(int(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(eigendecompose(h));
}
BENCHMARK(BM_Eigendecompose)->Arg(60)->Arg(120)->Arg(240)->Unit(benchmark::kMillisecond);

static void BM_SturmGap(benchmark::State& st) {
  auto p = ring(int(st.range(0)));
  p.omega = 8.0;
  for (auto _ : st) benchmark::DoNotOptimize(tunneling_gap(p));
}
BENCHMARK(BM_SturmGap)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_Evolve(benchmark::State& st) {
  auto p = ring(120);
  p.inertia_ns = 1.0;
  auto h = build_ring_hamiltonian(p);
  auto psi = prepare_initial_state({}, p);
  auto t = uniform_times(1000.0, int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(evolve(h, psi, t, p.inertia_ns));
}
BENCHMARK(BM_Evolve)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_GyOdd(benchmark::State& st) {
  GyConfig c;
  for (auto _ : st) benchmark::DoNotOptimize(gy_ratio_odd(c));
}
BENCHMARK(BM_GyOdd)->Unit(benchmark::kMillisecond);

static void BM_GyEven(benchmark::State& st) {
  GyConfig c;
  for (auto _ : st) benchmark::DoNotOptimize(gy_ratio_even_primed(c));
}
BENCHMARK(BM_GyEven)->Unit(benchmark::kMillisecond);

static void BM_LabFrameShort(benchmark::State& st) {
  auto g = build_synthetic_graph({});
  auto d = make_ring_drives(g, 0.00135, 0.00375, 2, 0.0);
  auto psi = ring_basis_state(g, 0);
  auto t = uniform_times(200.0, 21);
  for (auto _ : st) benchmark::DoNotOptimize(simulate_lab_frame(g, d, psi, t));
}
BENCHMARK(BM_LabFrameShort)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
