#include <benchmark/benchmark.h>

#include "blurfitts/correction.hpp"
#include "blurfitts/fitting.hpp"
#include "blurfitts/simulator.hpp"

using namespace blurfitts;

namespace {

const ModelParams ab_truth{56.8, 200, 0.0738, 1.88, std::nullopt};

Dataset grid_dataset(ModelKind kind, const ModelParams& params) {
  Dataset data;
  for (const auto& c : experiment1_design())
    data.points.push_back({c, predict_mt({kind}, params, c).value, 21});
  return data;
}

std::vector<SessionLog> simulated_logs() {
  SyntheticUser user;
  user.truth_spec = {ModelKind::one_part_ab_shift};
  user.truth_params = ab_truth;
  user.mt_noise_sd = 40;
  user.endpoint_spread_ratio = 0.2;
  user.seed = 1;
  return simulate_experiment(user, experiment1_design());
}

void BM_FitAbShift(benchmark::State& state) {
  const auto data = grid_dataset(ModelKind::one_part_ab_shift, ab_truth);
  for (auto _ : state) benchmark::DoNotOptimize(fit({ModelKind::one_part_ab_shift}, data));
}
BENCHMARK(BM_FitAbShift)->Unit(benchmark::kMillisecond);

void BM_FitAllKinds(benchmark::State& state) {
  const auto data = grid_dataset(ModelKind::one_part_ab_shift, ab_truth);
  std::vector<ModelSpec> specs;
  for (ModelKind k : all_model_kinds) specs.push_back({k});
  for (auto _ : state) benchmark::DoNotOptimize(compare(specs, data));
}
BENCHMARK(BM_FitAllKinds)->Unit(benchmark::kMillisecond);

void BM_Loocv(benchmark::State& state) {
  const auto data = grid_dataset(ModelKind::one_part_ab_shift, ab_truth);
  FitOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(loocv({ModelKind::one_part_ab_shift}, data, opts));
}
BENCHMARK(BM_Loocv)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_DeltaWNumeric(benchmark::State& state) {
  const AbShiftParams p{56.8, 200, 0.0738, 1.88};
  for (auto _ : state) benchmark::DoNotOptimize(delta_w_numeric(p, {300, 18, 101}));
}
BENCHMARK(BM_DeltaWNumeric);

void BM_Simulate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(simulated_logs());
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

void BM_Aggregate(benchmark::State& state) {
  const auto logs = simulated_logs();
  for (auto _ : state) benchmark::DoNotOptimize(aggregate(logs));
}
BENCHMARK(BM_Aggregate)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
