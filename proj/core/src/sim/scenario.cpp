#include "forestfire/sim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "forestfire/error.hpp"

namespace forestfire::sim {

namespace {

using nlohmann::json;

template <typename T>
T get(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

risk::VariableValues values_from(const json& j, risk::VariableValues fallback) {
  for (const auto& [key, value] : j.items()) {
    const auto v = risk::parse_variable(key);
    if (!v) throw ConfigError("unknown variable '" + key + "'");
    fallback[risk::index_of(*v)] = value.get<double>();
  }
  return fallback;
}

json values_json(const risk::VariableValues& values) {
  json j = json::object();
  for (risk::Variable v : risk::kVariables) j[std::string(risk::to_string(v))] = values[risk::index_of(v)];
  return j;
}

double parse_double(std::string_view field, std::size_t line) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ConfigError("series line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return out;
}

}  // namespace

std::map<std::string, std::vector<SeriesRow>> parse_series_csv(std::string_view text) {
  std::map<std::string, std::vector<SeriesRow>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#' || line.starts_with("t_s")) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 2 + risk::kVariableCount) {
      throw ConfigError("series line " + std::to_string(number) + ": expected 9 fields");
    }
    SeriesRow row;
    row.t_s = static_cast<std::int64_t>(parse_double(fields[0], number));
    for (std::size_t i = 0; i < risk::kVariableCount; ++i) row.values[i] = parse_double(fields[2 + i], number);
    auto& rows = out[std::string(fields[1])];
    if (!rows.empty() && row.t_s <= rows.back().t_s) {
      throw ConfigError("series line " + std::to_string(number) + ": times must increase per area");
    }
    rows.push_back(row);
  }
  return out;
}

Scenario Scenario::from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    if (j.value("format", "") != "forestfire-scenario") throw ConfigError("not a forestfire-scenario document");
    if (j.value("version", 0) != 1) throw ConfigError("unsupported scenario version");
    Scenario s;
    s.name = get<std::string>(j, "name", "scenario");
    s.seed = get<std::uint64_t>(j, "seed", 1);
    s.start = risk::parse_timestamp(j.at("start").get<std::string>());
    s.duration_s = j.at("duration_s").get<std::int64_t>();
    s.cycle_period_s = get<std::int64_t>(j, "cycle_period_s", 300);
    s.radius_m = get<double>(j, "radius_m", 200.0);
    s.ttl = get<int>(j, "ttl", 8);
    s.link_delay_ms = get<std::int64_t>(j, "link_delay_ms", 50);
    s.uplink_delay_ms = get<std::int64_t>(j, "uplink_delay_ms", 100);
    s.pool_size = get<std::size_t>(j, "pool_size", 1024);
    if (s.duration_s <= 0) throw ConfigError("duration_s must be positive");
    if (s.cycle_period_s <= 0) throw ConfigError("cycle_period_s must be positive");
    if (s.ttl < 0) throw ConfigError("ttl must be non-negative");
    if (s.radius_m < 0 || s.link_delay_ms < 0 || s.uplink_delay_ms < 0) {
      throw ConfigError("radius and delays must be non-negative");
    }

    std::set<std::string> ids;
    for (const auto& n : j.at("nodes")) {
      NodeSpec node;
      node.device_id = n.at("device_id").get<std::string>();
      node.area_id = n.at("area_id").get<std::string>();
      node.location = {n.at("lat").get<double>(), n.at("lon").get<double>()};
      node.battery = get<double>(n, "battery", 100.0);
      node.offset_s = get<std::int64_t>(n, "offset_s", 0);
      if (n.contains("period_s")) node.period_s = n.at("period_s").get<std::int64_t>();
      node.default_uplink = get<bool>(n, "uplink", true);
      for (const auto& c : n.value("coverage", json::array())) {
        node.coverage.push_back({c.at("from_s").get<std::int64_t>(), c.at("to_s").get<std::int64_t>(),
                                 c.at("uplink").get<bool>()});
      }
      if (!risk::is_valid_imei(node.device_id)) throw ConfigError("node id '" + node.device_id + "' is not an IMEI");
      if (!ids.insert(node.device_id).second) throw ConfigError("duplicate node '" + node.device_id + "'");
      if (node.period_s && *node.period_s <= 0) throw ConfigError("node period must be positive");
      for (std::size_t i = 0; i < node.coverage.size(); ++i) {
        const auto& c = node.coverage[i];
        if (c.to_s <= c.from_s) throw ConfigError("empty coverage interval on node " + node.device_id);
        if (i > 0 && c.from_s < node.coverage[i - 1].to_s) {
          throw ConfigError("coverage intervals overlap or are unordered on node " + node.device_id);
        }
      }
      s.nodes.push_back(std::move(node));
    }
    if (s.nodes.empty()) throw ConfigError("scenario has no nodes");

    const json env = j.value("environment", json::object());
    s.environment.baseline = values_from(env.value("baseline", json::object()), s.environment.baseline);
    s.environment.noise = get<double>(env, "noise", 0.0);
    if (s.environment.noise < 0 || s.environment.noise >= 1) throw ConfigError("noise must be in [0, 1)");
    for (const auto& r : env.value("ramps", json::array())) {
      Ramp ramp;
      ramp.area_id = get<std::string>(r, "area_id", "");
      ramp.start_s = r.at("start_s").get<std::int64_t>();
      ramp.duration_s = r.at("duration_s").get<std::int64_t>();
      if (ramp.duration_s <= 0) throw ConfigError("ramp duration must be positive");
      for (const auto& [key, value] : r.at("target").items()) {
        const auto v = risk::parse_variable(key);
        if (!v) throw ConfigError("unknown variable '" + key + "'");
        ramp.target[*v] = value.get<double>();
      }
      s.environment.ramps.push_back(std::move(ramp));
    }
    if (env.contains("csv")) {
      std::filesystem::path csv = env.at("csv").get<std::string>();
      if (csv.is_relative()) csv = base_dir / csv;
      std::ifstream in(csv);
      if (!in) throw ConfigError("cannot read series " + csv.string());
      s.environment.series = parse_series_csv(std::string(std::istreambuf_iterator<char>(in), {}));
    }

    for (const auto& a : j.value("actions", json::array())) {
      ScheduledAction action;
      action.at_s = a.at("at_s").get<std::int64_t>();
      if (a.contains("declare")) {
        const auto& d = a.at("declare");
        const auto level = fuzzy::parse_risk_level(d.at("level").get<std::string>());
        if (!level) throw ConfigError("bad declaration level");
        action.declare = DeclarationAction{d.at("area_id").get<std::string>(), *level,
                                           d.at("ttl_seconds").get<std::int64_t>()};
      } else if (a.contains("frequency")) {
        const auto& f = a.at("frequency");
        action.frequency = FrequencyAction{f.at("device_id").get<std::string>(), f.at("period_seconds").get<std::int64_t>()};
      } else {
        throw ConfigError("action needs 'declare' or 'frequency'");
      }
      s.actions.push_back(std::move(action));
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  } catch (const InvalidMeasurement& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("scenario " + path.string() + " is not valid JSON");
  return from_json(j, path.parent_path());
}

json Scenario::to_json() const {
  json nodes_json = json::array();
  for (const auto& n : nodes) {
    json node{{"device_id", n.device_id}, {"area_id", n.area_id}, {"lat", n.location.latitude},
              {"lon", n.location.longitude}, {"battery", n.battery}, {"offset_s", n.offset_s},
              {"uplink", n.default_uplink}};
    if (n.period_s) node["period_s"] = *n.period_s;
    if (!n.coverage.empty()) {
      node["coverage"] = json::array();
      for (const auto& c : n.coverage) node["coverage"].push_back({{"from_s", c.from_s}, {"to_s", c.to_s}, {"uplink", c.uplink}});
    }
    nodes_json.push_back(std::move(node));
  }
  json ramps = json::array();
  for (const auto& r : environment.ramps) {
    json target = json::object();
    for (const auto& [v, value] : r.target) target[std::string(risk::to_string(v))] = value;
    ramps.push_back({{"area_id", r.area_id}, {"start_s", r.start_s}, {"duration_s", r.duration_s}, {"target", target}});
  }
  json actions_json = json::array();
  for (const auto& a : actions) {
    json action{{"at_s", a.at_s}};
    if (a.declare) {
      action["declare"] = {{"area_id", a.declare->area_id}, {"level", fuzzy::to_string(a.declare->level)},
                           {"ttl_seconds", a.declare->ttl_s}};
    }
    if (a.frequency) {
      action["frequency"] = {{"device_id", a.frequency->device_id}, {"period_seconds", a.frequency->period_s}};
    }
    actions_json.push_back(std::move(action));
  }
  return {{"format", "forestfire-scenario"},
          {"version", 1},
          {"name", name},
          {"seed", seed},
          {"start", risk::format_timestamp(start)},
          {"duration_s", duration_s},
          {"cycle_period_s", cycle_period_s},
          {"radius_m", radius_m},
          {"ttl", ttl},
          {"link_delay_ms", link_delay_ms},
          {"uplink_delay_ms", uplink_delay_ms},
          {"pool_size", pool_size},
          {"nodes", std::move(nodes_json)},
          {"environment", {{"baseline", values_json(environment.baseline)}, {"noise", environment.noise}, {"ramps", ramps}}},
          {"actions", std::move(actions_json)}};
}

}  // namespace forestfire::sim
