#include "forestfire/sim/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "forestfire/error.hpp"

namespace forestfire::sim {

double haversine_m(const risk::GeoPoint& a, const risk::GeoPoint& b) {
  constexpr double kEarthRadiusM = 6'371'000.0;
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (b.latitude - a.latitude) * kRad;
  const double dlon = (b.longitude - a.longitude) * kRad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.latitude * kRad) * std::cos(b.latitude * kRad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

NeighborGraph NeighborGraph::build(const std::vector<risk::GeoPoint>& positions, double radius_m) {
  NeighborGraph g;
  g.adjacency_.resize(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      if (haversine_m(positions[i], positions[j]) <= radius_m) {
        g.adjacency_[i].push_back(j);
        g.adjacency_[j].push_back(i);
      }
    }
  }
  for (auto& list : g.adjacency_) std::sort(list.begin(), list.end());
  return g;
}

bool NeighborGraph::adjacent(std::size_t a, std::size_t b) const {
  const auto& list = adjacency_.at(a);
  return std::binary_search(list.begin(), list.end(), b);
}

std::vector<std::size_t> NeighborGraph::hops_from(std::size_t from) const {
  std::vector<std::size_t> hops(size(), SIZE_MAX);
  std::deque<std::size_t> queue{from};
  hops.at(from) = 0;
  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    for (std::size_t m : adjacency_[n]) {
      if (hops[m] == SIZE_MAX) {
        hops[m] = hops[n] + 1;
        queue.push_back(m);
      }
    }
  }
  return hops;
}

CoverageSchedule::CoverageSchedule(std::vector<CoverageInterval> intervals, bool default_uplink)
    : intervals_(std::move(intervals)), default_uplink_(default_uplink) {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (intervals_[i].to_s <= intervals_[i].from_s || (i > 0 && intervals_[i].from_s < intervals_[i - 1].to_s)) {
      throw ConfigError("coverage intervals must be non-empty, ordered and non-overlapping");
    }
  }
}

bool CoverageSchedule::covered_at_ms(std::int64_t t_ms) const {
  for (const auto& c : intervals_) {
    if (t_ms >= c.from_s * 1000 && t_ms < c.to_s * 1000) return c.uplink;
  }
  return default_uplink_;
}

bool CoverageSchedule::ever_covered(std::int64_t until_s) const {
  std::int64_t cursor = 0;
  for (const auto& c : intervals_) {
    if (c.from_s >= until_s) break;
    if (c.from_s > cursor && default_uplink_) return true;
    if (c.uplink && c.to_s > 0) return true;
    cursor = std::max(cursor, c.to_s);
  }
  return cursor < until_s && default_uplink_;
}

}  // namespace forestfire::sim
