#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace forestfire::fuzzy {

// Severity of detected forest fire risk, totally ordered.
enum class RiskLevel : std::uint8_t {
  nfr = 0,  // nonexistent
  lfr = 1,  // low
  hfr = 2,  // high
  efr = 3,  // extreme
};

inline constexpr std::size_t kRiskLevelCount = 4;
inline constexpr std::array<RiskLevel, kRiskLevelCount> kRiskLevels{RiskLevel::nfr, RiskLevel::lfr,
                                                                   RiskLevel::hfr, RiskLevel::efr};

constexpr std::size_t index_of(RiskLevel level) { return static_cast<std::size_t>(level); }

std::string_view to_string(RiskLevel level);
std::optional<RiskLevel> parse_risk_level(std::string_view text);

// Activation degree per risk level, indexed by RiskLevel.
struct LevelActivations {
  std::array<double, kRiskLevelCount> values{};

  double& operator[](RiskLevel level) { return values[index_of(level)]; }
  double operator[](RiskLevel level) const { return values[index_of(level)]; }

  bool all_zero() const {
    for (double v : values) {
      if (v != 0.0) return false;
    }
    return true;
  }

  friend bool operator==(const LevelActivations&, const LevelActivations&) = default;
};

}  // namespace forestfire::fuzzy
