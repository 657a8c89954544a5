#include <benchmark/benchmark.h>

#include <random>

#include "forestfire/config/rule_base.hpp"
#include "forestfire/fuzzy/inference.hpp"
#include "forestfire/risk/controller.hpp"

namespace ff = forestfire;

namespace {

const ff::config::RuleBase& rules() { return ff::config::default_rule_base(); }

void BM_Fuzzify(benchmark::State& state) {
  const auto& var = rules().input(ff::risk::Variable::co2).linguistic;
  double x = 250;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ff::fuzzy::fuzzify(var, x));
    x = x > 2500 ? 250 : x + 7.3;
  }
}
BENCHMARK(BM_Fuzzify);

void BM_InferSevenTables(benchmark::State& state) {
  std::vector<std::pair<ff::fuzzy::FuzzifiedValue, ff::fuzzy::FuzzifiedValue>> inputs;
  const ff::risk::VariableValues last{41, 22, 28, 5, 1400, 6, 19}, avg{25, 50, 10, 40, 300, 0.5, 21};
  for (auto v : ff::risk::kVariables) {
    const auto& in = rules().input(v);
    inputs.emplace_back(ff::fuzzy::fuzzify(in.linguistic, last[ff::risk::index_of(v)]),
                        ff::fuzzy::fuzzify(in.linguistic, avg[ff::risk::index_of(v)]));
  }
  for (auto _ : state) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      benchmark::DoNotOptimize(ff::fuzzy::infer(rules().inputs[i].fam, inputs[i].first, inputs[i].second));
    }
  }
}
BENCHMARK(BM_InferSevenTables);

void BM_Centroid(benchmark::State& state) {
  ff::fuzzy::LevelActivations a;
  a.values = {0.2, 0.7, 0.4, 0.9};
  const ff::fuzzy::AggregatedOutput out(a, rules().output);
  const auto resolution = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ff::fuzzy::defuzzify_centroid(out, resolution));
}
BENCHMARK(BM_Centroid)->Arg(101)->Arg(1001)->Arg(10001);

// One assessment against a same-day history of `range(0)` samples.
void BM_Assess(benchmark::State& state) {
  const ff::risk::RiskController controller(ff::config::default_rule_base_ptr());
  const auto t0 = ff::risk::parse_timestamp("2026-07-01T00:00:00Z");
  ff::risk::AreaState area;
  area.area_id = "bench";
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> noise(0.98, 1.02);
  ff::risk::Measurement m;
  m.device_id = "356938035643809";
  m.area_id = "bench";
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    m.timestamp = t0 + std::chrono::seconds(60 * i);
    m.values = {25 * noise(rng), 50 * noise(rng), 10 * noise(rng), 40 * noise(rng),
                300 * noise(rng), 0.5 * noise(rng), 21 * noise(rng)};
    area = controller.assess(area, m).second;
  }
  m.timestamp = t0 + std::chrono::seconds(60 * state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(controller.assess(area, m));
}
BENCHMARK(BM_Assess)->Arg(1)->Arg(100)->Arg(1000);

}  // namespace
