#include <benchmark/benchmark.h>

#include "stcmac/analytics.hpp"
#include "stcmac/geometry.hpp"
#include "stcmac/montecarlo.hpp"
#include "stcmac/simulator.hpp"

namespace {

stcmac::ScenarioConfig unit_scenario(double t_f, double beta, double alpha = 1.0) {
  stcmac::ScenarioConfig cfg;
  cfg.sound_speed = 1.0;
  cfg.coverage = alpha == 1.0 ? stcmac::Coverage::disk(1.0) : stcmac::Coverage::ellipse(1.0, alpha);
  cfg.packet_duration = t_f;
  cfg.guard_coefficient = beta;
  cfg.arrival_rate = 0.5;
  cfg.num_nodes = 2;
  return cfg;
}

stcmac::ScenarioConfig field_scenario(double alpha) {
  stcmac::ScenarioConfig cfg;
  cfg.coverage = alpha == 1.0 ? stcmac::Coverage::disk(1500.0) : stcmac::Coverage::ellipse(1500.0, alpha);
  cfg.packet_duration = 0.9;
  cfg.guard_coefficient = 0.6;
  cfg.arrival_rate = 0.1;
  cfg.num_nodes = 10;
  return cfg;
}

void BM_AnalyzeDisk(benchmark::State& state) {
  const auto cfg = unit_scenario(0.1, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(stcmac::analyze(cfg));
}
BENCHMARK(BM_AnalyzeDisk);

void BM_AnalyzeEllipseRadial(benchmark::State& state) {
  const auto cfg = unit_scenario(0.7, 0.4, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(stcmac::analyze(cfg, {.weighting = stcmac::WeightingMode::Radial}));
}
BENCHMARK(BM_AnalyzeEllipseRadial);

void BM_CoveredArea(benchmark::State& state) {
  const auto cov = stcmac::Coverage::ellipse(1.0, 1.5);
  double r = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stcmac::covered_area_within_radius(cov, r));
    r = r + 1e-3 <= 1.5 ? r + 1e-3 : 0.0;
  }
}
BENCHMARK(BM_CoveredArea);

void BM_MonteCarloTable(benchmark::State& state) {
  stcmac::McConfig mc;
  mc.scenario = unit_scenario(0.7, 0.4);
  mc.runs = static_cast<std::uint64_t>(state.range(0));
  mc.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(stcmac::estimate_table(mc));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloTable)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SimReplication(benchmark::State& state) {
  stcmac::SimConfig sim;
  sim.scenario = field_scenario(1.5);
  sim.num_slots = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(stcmac::run_replication(sim, rep++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimReplication)->Arg(2000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
