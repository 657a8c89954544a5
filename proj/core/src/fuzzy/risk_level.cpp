#include "forestfire/fuzzy/risk_level.hpp"

namespace forestfire::fuzzy {

std::string_view to_string(RiskLevel level) {
  switch (level) {
    case RiskLevel::nfr:
      return "NFR";
    case RiskLevel::lfr:
      return "LFR";
    case RiskLevel::hfr:
      return "HFR";
    case RiskLevel::efr:
      return "EFR";
  }
  return "?";
}

std::optional<RiskLevel> parse_risk_level(std::string_view text) {
  for (RiskLevel level : kRiskLevels) {
    if (to_string(level) == text) return level;
  }
  return std::nullopt;
}

}  // namespace forestfire::fuzzy
