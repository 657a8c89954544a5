#pragma once

#include <cstdint>

#include "forestfire/sim/scenario.hpp"

namespace forestfire::sim {

struct TopologyOptions {
  std::size_t min_nodes = 2;
  std::size_t max_nodes = 20;
  double radius_m = 200.0;
  std::int64_t cycles = 8;
  std::int64_t cycle_period_s = 300;
  double covered_fraction = 0.25;  // at least one node is always covered
  double noise = 0.02;
};

// Seeded random connected topology. Each node is placed within radius of an
// earlier one, so every node reaches a covered node; each node reports for
// its own area, and the ttl equals the node count.
Scenario random_topology(std::uint64_t seed, const TopologyOptions& options = {});

}  // namespace forestfire::sim
