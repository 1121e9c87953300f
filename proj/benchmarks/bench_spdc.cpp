#include <benchmark/benchmark.h>

#include "spdc/collection.hpp"
#include "spdc/phase.hpp"
#include "support.hpp"

using namespace spdc;

namespace {

const SourceModel& model() {
  static const SourceModel m = test::default_model();
  return m;
}

void BM_SellmeierIndex(benchmark::State& state) {
  const auto& bbo = model().nonlinear_material();
  double lam = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bbo.ordinary.index(Wavelength::from_um(lam)));
    lam = lam < 1.0 ? lam + 1e-4 : 0.5;
  }
}
BENCHMARK(BM_SellmeierIndex);

void BM_DeltaPhi(benchmark::State& state) {
  const PhaseEngine engine(model());
  const auto a = EmissionAngle::from_deg(0.1, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(engine.depth_averaged_delta_phi(a, model().signal));
}
BENCHMARK(BM_DeltaPhi);

void BM_PhaseMap(benchmark::State& state) {
  const PhaseEngine engine(model());
  const GridSpec grid{1.0 / static_cast<double>(state.range(0)), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(engine.phase_map(grid));
  state.SetItemsProcessed(state.iterations() * grid.side() * grid.side());
}
BENCHMARK(BM_PhaseMap)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_ApertureFidelity(benchmark::State& state) {
  const auto map = PhaseEngine(model()).phase_map({0.02, 1.0});
  ApertureSpec ap;
  ap.scale_mm_per_deg = model().stack.angle_position_scale();
  ap.diameter_mm = static_cast<double>(state.range(0)) / 100.0;
  const EmissionProfile profile{0.17, 1.0, false};
  for (auto _ : state) benchmark::DoNotOptimize(aperture_fidelity(map, ap, profile));
}
BENCHMARK(BM_ApertureFidelity)->Arg(65)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_CompensatorOptimum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(optimize_compensator_thickness(model(), 0.5, 8.0));
}
BENCHMARK(BM_CompensatorOptimum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
