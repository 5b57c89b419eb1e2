#include <benchmark/benchmark.h>

#include "mor/baselines.hpp"
#include "mor/iha.hpp"
#include "mor/norms.hpp"
#include "mor/synthetic.hpp"

namespace {

using namespace mor;

void BM_EvalSparse(benchmark::State& state) {
  const LtiSystem sys = make_synthetic({SyntheticKind::sss, static_cast<int>(state.range(0)), 1});
  const cplx s(0.3, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(eval_deriv(sys, s));
}
BENCHMARK(BM_EvalSparse)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_HinfLevelSet(benchmark::State& state) {
  const LtiSystem sys = make_synthetic({SyntheticKind::generic, static_cast<int>(state.range(0)), 2});
  for (auto _ : state) benchmark::DoNotOptimize(hinf_norm(sys));
}
BENCHMARK(BM_HinfLevelSet)->Arg(20)->Arg(60)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_HinfSampled(benchmark::State& state) {
  const LtiSystem sys = make_synthetic({SyntheticKind::sss, static_cast<int>(state.range(0)), 3});
  for (auto _ : state) benchmark::DoNotOptimize(hinf_norm_sampled(sys));
}
BENCHMARK(BM_HinfSampled)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Irka(benchmark::State& state) {
  const LtiSystem sys = make_synthetic({SyntheticKind::sss, 2000, 4});
  IrkaConfig cfg;
  cfg.r = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_irka(sys, cfg));
}
BENCHMARK(BM_Irka)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Iha(benchmark::State& state) {
  const LtiSystem sys = make_synthetic({SyntheticKind::sss, 2000, 4});
  IhaConfig cfg;
  cfg.irka.r = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_iha(sys, cfg));
}
BENCHMARK(BM_Iha)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Mbt(benchmark::State& state) {
  const LtiSystem sys = make_synthetic({SyntheticKind::generic, static_cast<int>(state.range(0)), 5});
  for (auto _ : state) benchmark::DoNotOptimize(modified_bt(sys, 4));
}
BENCHMARK(BM_Mbt)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
