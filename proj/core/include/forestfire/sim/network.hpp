#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "forestfire/risk/measurement.hpp"
#include "forestfire/sim/scenario.hpp"

namespace forestfire::sim {

// Great-circle distance on a sphere of radius 6371 km.
double haversine_m(const risk::GeoPoint& a, const risk::GeoPoint& b);

// Undirected graph with an edge between every pair of nodes at most
// radius_m apart.
class NeighborGraph {
 public:
  static NeighborGraph build(const std::vector<risk::GeoPoint>& positions, double radius_m);

  std::size_t size() const { return adjacency_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t node) const { return adjacency_.at(node); }
  bool adjacent(std::size_t a, std::size_t b) const;
  // Hop counts from `from`; unreachable nodes get SIZE_MAX.
  std::vector<std::size_t> hops_from(std::size_t from) const;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
};

class CoverageSchedule {
 public:
  CoverageSchedule() = default;
  CoverageSchedule(std::vector<CoverageInterval> intervals, bool default_uplink);

  bool covered_at_ms(std::int64_t t_ms) const;
  bool covered_at(std::int64_t t_s) const { return covered_at_ms(t_s * 1000); }
  // True if the node has uplink at some instant of [0, until_s).
  bool ever_covered(std::int64_t until_s) const;

 private:
  std::vector<CoverageInterval> intervals_;
  bool default_uplink_ = true;
};

}  // namespace forestfire::sim
