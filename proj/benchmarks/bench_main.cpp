#include <benchmark/benchmark.h>

#include <vector>

#include "probe/carleman3d.hpp"
#include "probe/forward2d.hpp"
#include "probe/probe.hpp"
#include "probe/special_functions.hpp"
#include "probe/vekua.hpp"

using namespace probe;

static void BM_MlEval(benchmark::State& st) {
  const double alpha = st.range(0) / 100.0;
  const std::vector<cplx> zs{{0.5, 0.2}, {-3.0, 1.0}, {8.0, -6.0}, {-30.0, 0.1}, {-60.0, 40.0}};
  for (auto _ : st)
    for (const cplx& z : zs) benchmark::DoNotOptimize(ml_eval(alpha, z));
  st.SetItemsProcessed(st.iterations() * zs.size());
}
BENCHMARK(BM_MlEval)->Arg(25)->Arg(50)->Arg(75)->Arg(100);

static void BM_Needle3dEval(benchmark::State& st) {
  const Frame3 fr;
  const Vec3 y(0.3, -0.2, 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(needle3d_eval(y, Vec3::Zero(), 0.5, static_cast<double>(st.range(0)), fr));
}
BENCHMARK(BM_Needle3dEval)->Arg(1)->Arg(10)->Arg(30)->Unit(benchmark::kMicrosecond);

static void BM_HelmholtzEval(benchmark::State& st) {
  HelmholtzNeedleParams p;
  p.lambda = 2.0;
  p.alpha = 0.5;
  p.tau = 10.0;
  const Vec3 y(0.3, -0.2, 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(helmholtz_needle_eval(y, Vec3::Zero(), p));
}
BENCHMARK(BM_HelmholtzEval)->Unit(benchmark::kMillisecond);

static void BM_DtnAssemble(benchmark::State& st) {
  Geometry2 g;
  g.nodes_per_curve = static_cast<int>(st.range(0));
  g.cavities.push_back(Curve2::disk(0.3, 0.0, 0.25));
  for (auto _ : st) benchmark::DoNotOptimize(dtn_assemble(g, DtnBasis::FourierModes, 64));
}
BENCHMARK(BM_DtnAssemble)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_IndicatorSequence(benchmark::State& st) {
  Geometry2 g;
  g.cavities.push_back(Curve2::disk(0.0, 0.0, 0.4));
  const auto l0 = dtn_empty(1.0, DtnBasis::FourierModes, 64);
  const auto ld = dtn_assemble(g, DtnBasis::FourierModes, 64);
  const Needle nd{{0.6, 0.0}, Direction2::from_angle(0.0)};
  const auto s = build_schedule(Disk2{{0.0, 0.0}, 1.0}, nd);
  for (auto _ : st) benchmark::DoNotOptimize(indicator_sequence(l0, ld, nd, s, 12));
}
BENCHMARK(BM_IndicatorSequence)->Unit(benchmark::kMillisecond);

static void BM_BuildSchedule(benchmark::State& st) {
  const Needle nd{{0.0, 0.0}, Direction2::from_angle(0.3)};
  ScheduleOptions o;
  o.n_max = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(build_schedule(Disk2{{0.0, 0.0}, 1.0}, nd, o));
}
BENCHMARK(BM_BuildSchedule)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
