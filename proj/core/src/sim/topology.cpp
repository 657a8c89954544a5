#include "forestfire/sim/topology.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "forestfire/sim/environment.hpp"

namespace forestfire::sim {

namespace {

std::string imei_for(std::uint64_t seed, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "35%07llu%06zu", static_cast<unsigned long long>(seed % 10'000'000), i);
  return buf;
}

}  // namespace

Scenario random_topology(std::uint64_t seed, const TopologyOptions& options) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 1);
  const std::size_t span = options.max_nodes - options.min_nodes + 1;
  const std::size_t count = options.min_nodes + static_cast<std::size_t>(rng() % span);

  Scenario s;
  s.name = "random-" + std::to_string(seed);
  s.seed = seed;
  s.start = risk::parse_timestamp("2026-07-01T06:00:00Z");
  s.cycle_period_s = options.cycle_period_s;
  s.duration_s = options.cycles * options.cycle_period_s;
  s.radius_m = options.radius_m;
  s.ttl = static_cast<int>(count);
  s.pool_size = 1;
  while (static_cast<std::int64_t>(s.pool_size) < options.cycles) s.pool_size *= 2;
  s.environment.noise = options.noise;

  constexpr double kMetresPerDegree = 111'195.0;
  const risk::GeoPoint origin{40.0, 22.0};
  const double lon_scale = std::cos(origin.latitude * std::numbers::pi / 180.0);
  std::vector<std::pair<double, double>> xy;  // metres east, north
  for (std::size_t i = 0; i < count; ++i) {
    double x = 0, y = 0;
    if (i > 0) {
      const auto& anchor = xy[rng() % xy.size()];
      const double r = options.radius_m * (0.2 + 0.75 * unit_uniform(rng));
      const double theta = 2 * std::numbers::pi * unit_uniform(rng);
      x = anchor.first + r * std::cos(theta);
      y = anchor.second + r * std::sin(theta);
    }
    xy.emplace_back(x, y);
    NodeSpec n;
    n.device_id = imei_for(seed, i);
    n.area_id = "area-" + std::to_string(i);
    n.location = {origin.latitude + y / kMetresPerDegree, origin.longitude + x / (kMetresPerDegree * lon_scale)};
    n.battery = 60 + 40 * unit_uniform(rng);
    n.offset_s = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(options.cycle_period_s));
    n.default_uplink = false;
    s.nodes.push_back(std::move(n));
  }
  s.nodes[rng() % count].default_uplink = true;
  for (auto& n : s.nodes) {
    if (unit_uniform(rng) < options.covered_fraction) n.default_uplink = true;
  }
  return s;
}

}  // namespace forestfire::sim
