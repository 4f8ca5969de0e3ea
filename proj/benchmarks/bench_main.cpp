#include <benchmark/benchmark.h>

#include "copula_exo/exo_test.hpp"
#include "copula_exo/marginals.hpp"
#include "copula_exo/simlab.hpp"
#include "copula_exo/special_functions.hpp"
#include "copula_exo/transform.hpp"

using namespace copula_exo;

static void BM_NormalQuantile(benchmark::State& state) {
  double p = 0.0;
  for (auto _ : state) {
    p = p >= 0.999 ? 0.0005 : p + 0.001;
    benchmark::DoNotOptimize(normal_quantile(p));
  }
}
BENCHMARK(BM_NormalQuantile);

static void BM_MarginalQuantileFromNormal(benchmark::State& state) {
  const Marginal m = state.range(0) == 0 ? Marginal::student_t(2) : Marginal::beta(0.5, 0.5);
  double v = -6.0;
  for (auto _ : state) {
    v = v > 6.0 ? -6.0 : v + 0.01;
    benchmark::DoNotOptimize(m.quantile_from_normal(v));
  }
}
BENCHMARK(BM_MarginalQuantileFromNormal)->Arg(0)->Arg(1);

static void BM_NormalScoresContinuous(benchmark::State& state) {
  RngStream rng(1, 1);
  Eigen::VectorXd x(state.range(0));
  for (auto& v : x) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(normal_scores_continuous(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NormalScoresContinuous)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_InstrumentTest(benchmark::State& state) {
  auto spec = ScenarioSpec::instrument_defaults();
  spec.t = static_cast<std::size_t>(state.range(0));
  const auto rep = generate_replication(spec, 0);
  TestOptions o;
  o.estimate_raw = false;
  for (auto _ : state) {
    RngStream rng(2, 2);
    benchmark::DoNotOptimize(instrument_exogeneity_test(rep.data, o, rng));
  }
}
BENCHMARK(BM_InstrumentTest)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_Prop1Factor(benchmark::State& state) {
  const Marginal m = Marginal::exponential(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(prop1_factor(m));
}
BENCHMARK(BM_Prop1Factor)->Unit(benchmark::kMicrosecond);

static void BM_RunScenario(benchmark::State& state) {
  auto spec = ScenarioSpec::regressor_defaults();
  spec.t = 1000;
  spec.n_reps = 20;
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(spec));
}
BENCHMARK(BM_RunScenario)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
