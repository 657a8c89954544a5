#include <benchmark/benchmark.h>

#include "forestfire/config/rule_base.hpp"
#include "forestfire/sim/scenario.hpp"
#include "forestfire/sim/simulator.hpp"
#include "forestfire/sim/topology.hpp"

namespace ff = forestfire;

namespace {

// Full in-process run: sealing, routing, verification and assessment.
void BM_FireRampScenario(benchmark::State& state) {
  const auto scenario = ff::sim::Scenario::load(std::string(FORESTFIRE_SOURCE_DIR) + "/scenarios/fire-ramp.json");
  for (auto _ : state) {
    ff::sim::Simulator sim(scenario, ff::config::default_rule_base_ptr());
    benchmark::DoNotOptimize(sim.run());
  }
}
BENCHMARK(BM_FireRampScenario)->Unit(benchmark::kMillisecond);

void BM_RandomTopology(benchmark::State& state) {
  std::uint64_t seed = 1;
  std::size_t packages = 0;
  for (auto _ : state) {
    ff::sim::Simulator sim(ff::sim::random_topology(seed++), ff::config::default_rule_base_ptr());
    packages += sim.run().packages.size();
  }
  state.counters["packages"] = benchmark::Counter(static_cast<double>(packages), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_RandomTopology)->Unit(benchmark::kMillisecond);

}  // namespace
