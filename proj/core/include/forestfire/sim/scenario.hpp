#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "forestfire/fuzzy/risk_level.hpp"
#include "forestfire/risk/measurement.hpp"

namespace forestfire::sim {

// Left-closed [from_s, to_s) window overriding a node's default uplink state.
struct CoverageInterval {
  std::int64_t from_s = 0;
  std::int64_t to_s = 0;
  bool uplink = false;
};

struct NodeSpec {
  std::string device_id;
  std::string area_id;
  risk::GeoPoint location;
  double battery = 100.0;
  std::int64_t offset_s = 0;  // first cycle
  std::optional<std::int64_t> period_s;
  bool default_uplink = true;
  std::vector<CoverageInterval> coverage;
};

// Linear drift from the baseline to `target` over [start_s, start_s + duration_s],
// held afterwards. Variables absent from `target` keep the baseline.
struct Ramp {
  std::string area_id;  // empty: every area
  std::int64_t start_s = 0;
  std::int64_t duration_s = 1;
  std::map<risk::Variable, double> target;
};

// Rows of a replayed time series; each row holds until the next one.
struct SeriesRow {
  std::int64_t t_s = 0;
  risk::VariableValues values{};
};

struct EnvironmentSpec {
  risk::VariableValues baseline{25, 50, 10, 40, 300, 0.5, 21};
  double noise = 0.0;  // multiplicative, uniform in [-noise, +noise]
  std::vector<Ramp> ramps;
  std::map<std::string, std::vector<SeriesRow>> series;  // by area; "*" for all
};

struct DeclarationAction {
  std::string area_id;
  fuzzy::RiskLevel level = fuzzy::RiskLevel::hfr;
  std::int64_t ttl_s = 0;
};

struct FrequencyAction {
  std::string device_id;
  std::int64_t period_s = 0;
};

struct ScheduledAction {
  std::int64_t at_s = 0;
  std::optional<DeclarationAction> declare;
  std::optional<FrequencyAction> frequency;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  risk::Timestamp start{};
  std::int64_t duration_s = 0;  // no cycle starts at or after this offset
  std::int64_t cycle_period_s = 300;
  double radius_m = 200.0;
  int ttl = 8;
  std::int64_t link_delay_ms = 50;
  std::int64_t uplink_delay_ms = 100;
  std::size_t pool_size = 1024;
  std::vector<NodeSpec> nodes;
  EnvironmentSpec environment;
  std::vector<ScheduledAction> actions;

  // Throws ConfigError. Relative CSV paths resolve against base_dir.
  static Scenario from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static Scenario load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// Parses "t_s,area,temperature,humidity,wind_speed,rainfall,co2,co,o2" rows.
std::map<std::string, std::vector<SeriesRow>> parse_series_csv(std::string_view text);

}  // namespace forestfire::sim
