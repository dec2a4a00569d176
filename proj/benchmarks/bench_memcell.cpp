#include <benchmark/benchmark.h>

#include <numbers>

#include "memcell/channel.hpp"
#include "memcell/fixpoint.hpp"
#include "memcell/oracle.hpp"
#include "memcell/spectral.hpp"
#include "memcell/superactivation.hpp"

using namespace memcell;

static void BM_PeripheralSpectrum(benchmark::State& state) {
  const auto c = oracle::random_channel({state.range(0), 2, 1, {}});
  for (auto _ : state) benchmark::DoNotOptimize(peripheral_spectrum(c));
}
BENCHMARK(BM_PeripheralSpectrum)->DenseRange(2, 8, 2);

static void BM_StructurePlanted(benchmark::State& state) {
  const Index n = state.range(0);
  const auto c = oracle::random_channel({n + 1, 2, 3, {{n / 2, 1, {}}, {1, n - n / 2, {}}}});
  for (auto _ : state) benchmark::DoNotOptimize(structure_decomposition(c));
}
BENCHMARK(BM_StructurePlanted)->DenseRange(2, 8, 2);

static void BM_TensorPowerGrowth(benchmark::State& state) {
  Matrix u = Matrix::Identity(2, 2);
  u(1, 1) = std::polar(1.0, std::numbers::pi / 3);
  const auto c = cells::unitary(u);
  for (auto _ : state) benchmark::DoNotOptimize(tensor_power_analysis(c, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TensorPowerGrowth)->DenseRange(2, 4, 1)->Unit(benchmark::kMillisecond);

static void BM_Witness(benchmark::State& state) {
  const auto e = cells::phase_spectator(std::numbers::pi / 3);
  const auto a = analyze(e);
  const auto v = check_quantum_superactivation(a, a);
  for (auto _ : state) benchmark::DoNotOptimize(construct_entangled_stationary(e, a, e, a, *v.pair));
}
BENCHMARK(BM_Witness);

static void BM_SuperactivationReport(benchmark::State& state) {
  const auto e = cells::phase_spectator(std::numbers::pi / 3);
  for (auto _ : state) benchmark::DoNotOptimize(superactivation_report(e, e, 3));
}
BENCHMARK(BM_SuperactivationReport)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
