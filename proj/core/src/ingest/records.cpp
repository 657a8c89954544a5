#include "forestfire/ingest/records.hpp"

#include <array>

#include <nlohmann/json.hpp>

namespace forestfire::ingest {

namespace {
constexpr std::array<std::string_view, 3> kAlertStates{"active", "superseded", "cleared"};
}

std::string_view to_string(AlertState s) { return kAlertStates[static_cast<std::size_t>(s)]; }

std::optional<AlertState> parse_alert_state(std::string_view text) {
  for (std::size_t i = 0; i < kAlertStates.size(); ++i) {
    if (kAlertStates[i] == text) return static_cast<AlertState>(i);
  }
  return std::nullopt;
}

nlohmann::json to_json(const risk::RiskAssessment& a) {
  nlohmann::json last = nlohmann::json::object();
  nlohmann::json averages = nlohmann::json::object();
  nlohmann::json activations = nlohmann::json::object();
  nlohmann::json clamped = nlohmann::json::array();
  for (risk::Variable v : risk::kVariables) {
    const auto i = risk::index_of(v);
    const std::string name(risk::to_string(v));
    last[name] = a.last[i];
    averages[name] = a.averages[i];
    activations[name] = a.activations[i].values;
    if (a.clamped[i]) clamped.push_back(name);
  }
  return {
      {"area_id", a.area_id},
      {"device_id", a.device_id},
      {"timestamp", risk::format_timestamp(a.timestamp)},
      {"percentage", a.percentage},
      {"level", fuzzy::to_string(a.level)},
      {"window", a.window.to_string()},
      {"samples_averaged", a.samples_averaged},
      {"cold_start", a.cold_start},
      {"last", std::move(last)},
      {"averages", std::move(averages)},
      {"activations", std::move(activations)},
      {"clamped", std::move(clamped)},
  };
}

nlohmann::json to_json(const AlertRecord& a) {
  nlohmann::json j{
      {"alert_id", a.id},
      {"area_id", a.area_id},
      {"level", fuzzy::to_string(a.level)},
      {"percentage", a.percentage},
      {"created", risk::format_timestamp(a.created)},
      {"package_id", a.package_id},
      {"state", to_string(a.state)},
  };
  j["supersedes"] = a.supersedes ? nlohmann::json(*a.supersedes) : nlohmann::json();
  j["superseded_by"] = a.superseded_by ? nlohmann::json(*a.superseded_by) : nlohmann::json();
  j["closed"] = a.closed ? nlohmann::json(risk::format_timestamp(*a.closed)) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const risk::Declaration& d) {
  return {{"level", fuzzy::to_string(d.level)}, {"expiry", risk::format_timestamp(d.expiry)}};
}

}  // namespace forestfire::ingest
