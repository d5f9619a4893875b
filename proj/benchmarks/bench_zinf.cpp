#include <benchmark/benchmark.h>

#include <cmath>

#include "zinf/fit.hpp"
#include "zinf/simulate.hpp"
#include "zinf/summation.hpp"

using namespace zinf;

namespace {

ModelSpec trajan_spec(Family f, ZiType z) {
  ModelSpec s;
  s.base = f;
  s.zi = z;
  s.mean_design = DesignSpec::saturated(kTrajanCell);
  return s;
}

CountDataset simulated(std::size_t n) {
  SimPlan p;
  p.spec.base = Family::NBquad;
  p.spec.zi = ZiType::D;
  p.true_params = Eigen::Vector3d(std::log(3.0), 0.8, std::log(0.5));
  p.n = n;
  p.seed = 1;
  return simulate(p);
}

}  // namespace

static void BM_LoglikTrajan(benchmark::State& state) {
  const Likelihood lik(trajan_spec(Family::NBquad, ZiType::D), trajan_dataset());
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(lik.layout().size(), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(lik.loglik(p));
}
BENCHMARK(BM_LoglikTrajan);

static void BM_GradientTrajan(benchmark::State& state) {
  const Likelihood lik(trajan_spec(Family::NBquad, ZiType::D), trajan_dataset());
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(lik.layout().size(), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(lik.gradient(p));
}
BENCHMARK(BM_GradientTrajan);

static void BM_FitTrajan(benchmark::State& state) {
  const CountDataset d = trajan_dataset();
  const auto family = static_cast<Family>(state.range(0));
  const auto zi = static_cast<ZiType>(state.range(1));
  const ModelSpec spec = trajan_spec(family, zi);
  state.SetLabel(model_label(spec));
  for (auto _ : state) benchmark::DoNotOptimize(fit_mle(spec, d).loglik_value);
}
BENCHMARK(BM_FitTrajan)
    ->Args({static_cast<int>(Family::Poisson), static_cast<int>(ZiType::None)})
    ->Args({static_cast<int>(Family::Poisson), static_cast<int>(ZiType::D)})
    ->Args({static_cast<int>(Family::NBquad), static_cast<int>(ZiType::D)})
    ->Args({static_cast<int>(Family::NBlin), static_cast<int>(ZiType::None)})
    ->Unit(benchmark::kMillisecond);

static void BM_FitSimulated(benchmark::State& state) {
  const CountDataset d = simulated(static_cast<std::size_t>(state.range(0)));
  ModelSpec spec;
  spec.base = Family::NBquad;
  spec.zi = ZiType::D;
  FitOptions o;
  o.compute_vcov = false;
  for (auto _ : state) benchmark::DoNotOptimize(fit_mle(spec, d, o).loglik_value);
}
BENCHMARK(BM_FitSimulated)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(simulated(static_cast<std::size_t>(state.range(0))).y.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(10000)->Arg(100000);

static void BM_ExactSum(benchmark::State& state) {
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(static_cast<double>(i)) * 1e3 - 7.0;
  for (auto _ : state) benchmark::DoNotOptimize(exact_sum(v));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExactSum)->Arg(270)->Arg(100000);
BENCHMARK_MAIN();
