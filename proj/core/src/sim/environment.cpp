#include "forestfire/sim/environment.hpp"

#include <algorithm>

namespace forestfire::sim {

risk::VariableValues EnvironmentModel::truth(std::string_view area_id, std::int64_t t_s) const {
  auto series = spec_.series.find(std::string(area_id));
  if (series == spec_.series.end()) series = spec_.series.find("*");
  if (series != spec_.series.end() && !series->second.empty()) {
    const auto& rows = series->second;
    const auto it = std::upper_bound(rows.begin(), rows.end(), t_s,
                                     [](std::int64_t t, const SeriesRow& r) { return t < r.t_s; });
    return it == rows.begin() ? rows.front().values : std::prev(it)->values;
  }

  risk::VariableValues values = spec_.baseline;
  for (const Ramp& ramp : spec_.ramps) {
    if (!ramp.area_id.empty() && ramp.area_id != area_id) continue;
    if (t_s <= ramp.start_s) continue;
    const double progress =
        std::min(1.0, static_cast<double>(t_s - ramp.start_s) / static_cast<double>(ramp.duration_s));
    for (const auto& [v, target] : ramp.target) {
      double& x = values[risk::index_of(v)];
      x += progress * (target - x);
    }
  }
  return values;
}

risk::VariableValues EnvironmentModel::sample(std::string_view area_id, std::int64_t t_s,
                                              std::mt19937_64& rng) const {
  risk::VariableValues values = truth(area_id, t_s);
  for (double& x : values) {
    const double u = unit_uniform(rng);  // drawn even without noise to keep streams aligned
    x *= 1.0 + spec_.noise * (2.0 * u - 1.0);
  }
  return values;
}

}  // namespace forestfire::sim
