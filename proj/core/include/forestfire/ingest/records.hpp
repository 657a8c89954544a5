#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "forestfire/risk/controller.hpp"

namespace forestfire::ingest {

enum class AlertState : std::uint8_t { active, superseded, cleared };

std::string_view to_string(AlertState s);
std::optional<AlertState> parse_alert_state(std::string_view text);

struct AlertRecord {
  std::uint64_t id = 0;
  std::string area_id;
  risk::RiskLevel level = risk::RiskLevel::lfr;
  double percentage = 0.0;
  risk::Timestamp created{};
  std::string package_id;  // triggering measurement
  AlertState state = AlertState::active;
  std::optional<std::uint64_t> supersedes;
  std::optional<std::uint64_t> superseded_by;
  std::optional<risk::Timestamp> closed;

  friend bool operator==(const AlertRecord&, const AlertRecord&) = default;
};

nlohmann::json to_json(const risk::RiskAssessment& a);
nlohmann::json to_json(const AlertRecord& a);
nlohmann::json to_json(const risk::Declaration& d);

}  // namespace forestfire::ingest
