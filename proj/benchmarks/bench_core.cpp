#include <benchmark/benchmark.h>

#include "spinjj/analysis.hpp"
#include "spinjj/elliptic.hpp"
#include "spinjj/integrator.hpp"
#include "spinjj/reduced.hpp"
#include "spinjj/wellmodes.hpp"

namespace {

using namespace spinjj;

const SystemParams kParams = SystemParams::symmetric(1.0, 1.0, -0.01, 0.0051);
const SpinorPair kState{Spinor{0.6, Complex(0, 0.48), 0.64}, Spinor{0.64, 0.6, Complex(0, 0.48)}};

void BM_Rhs(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(rhs(kState, kParams));
}
BENCHMARK(BM_Rhs);

void BM_RhsSpinForm(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(rhs_spin_form(kState, kParams));
}
BENCHMARK(BM_RhsSpinForm);

void BM_EllipticK(benchmark::State& st) {
  double k = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(elliptic_k(k));
    k = k < 0.99 ? k + 0.01 : 0.0;
  }
}
BENCHMARK(BM_EllipticK);

void BM_JacobiCnDn(benchmark::State& st) {
  double u = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(jacobi_cn_dn(u, 0.95));
    u += 0.37;
  }
}
BENCHMARK(BM_JacobiCnDn);

void BM_IntegrateOnePeriod(benchmark::State& st) {
  const double j = static_cast<double>(st.range(0)) * 1e-4;
  IntegratorConfig cfg;
  cfg.t_max = analytic_period({j, -0.01});
  cfg.sample_dt = cfg.t_max / 100;
  const SpinorPair s0{{1, 0, 0}, {0, 0, 1}};
  for (auto _ : st) benchmark::DoNotOptimize(integrate(s0, SystemParams::symmetric(1.0, 1.0, -0.01, j), cfg));
}
BENCHMARK(BM_IntegrateOnePeriod)->Arg(10)->Arg(51)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_IntegrateReduced(benchmark::State& st) {
  IntegratorConfig cfg;
  cfg.t_max = analytic_period({0.0051, -0.01});
  cfg.sample_dt = cfg.t_max / 100;
  for (auto _ : st) benchmark::DoNotOptimize(integrate_reduced({1, 0, 0}, {0.0051, -0.01}, cfg));
}
BENCHMARK(BM_IntegrateReduced)->Unit(benchmark::kMillisecond);

void BM_LowestModes(benchmark::State& st) {
  const DoubleWellPotential pot = DoubleWellPotential::quartic(10.0, 2.0);
  const Grid1D grid{-6.0, 6.0, static_cast<std::size_t>(st.range(0))};
  for (auto _ : st) benchmark::DoNotOptimize(lowest_modes(pot, grid));
}
BENCHMARK(BM_LowestModes)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
