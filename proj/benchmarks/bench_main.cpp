#include <benchmark/benchmark.h>

#include "slpos/estimators.hpp"
#include "slpos/harness.hpp"

namespace {

using namespace slpos;

std::vector<RangeObservation> bench_ranges() {
  RngStream rng(17);
  const Position truth{20, -15, 0};
  std::vector<RangeObservation> ranges;
  for (int i = 0; i < 5; ++i) {
    const Position anchor{rng.uniform(-200, 200), rng.uniform(-200, 200), 0};
    ranges.push_back({anchor, distance(truth, anchor) + rng.normal(0.0, 0.5)});
  }
  return ranges;
}

void BM_RangeMultilateration(benchmark::State& state) {
  const auto ranges = bench_ranges();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_range_multilateration(ranges));
  }
}
BENCHMARK(BM_RangeMultilateration);

void BM_TdoaSolve(benchmark::State& state) {
  RngStream rng(23);
  std::vector<AnchorSite> sites;
  for (int i = 0; i < 5; ++i) {
    sites.push_back({i, {rng.uniform(-200, 200), rng.uniform(-200, 200), 0}});
  }
  const Position truth{10, 25, 0};
  TdoaSet set;
  set.ref_anchor_id = 0;
  const double d_ref = distance(truth, sites[0].position);
  for (int i = 1; i < 5; ++i) {
    set.diffs.push_back({i, distance(truth, sites[i].position) - d_ref +
                                rng.normal(0.0, 1.0)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_tdoa(set, sites));
  }
}
BENCHMARK(BM_TdoaSolve);

void BM_HarnessTrial(benchmark::State& state) {
  ExperimentConfig config;
  config.scenario.layout = HighwayDrop{3, 4.0, 500.0, 0.02};
  config.scenario.n_anchors = 4;
  config.method = PositioningMethod::Tdoa;
  config.n_trials = 1;
  for (auto _ : state) {
    config.master_seed += 1;
    benchmark::DoNotOptimize(run(config));
  }
}
BENCHMARK(BM_HarnessTrial);

void BM_GdopSelection(benchmark::State& state) {
  ExperimentConfig config;
  config.scenario.layout = HighwayDrop{3, 4.0, 500.0, 0.05};
  config.scenario.n_anchors = 6;
  const Scenario scenario = generate(config.scenario);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        select_anchors(scenario, scenario.target_id, 6, AnchorPolicy::BestGdop));
  }
}
BENCHMARK(BM_GdopSelection);

}  // namespace

BENCHMARK_MAIN();
