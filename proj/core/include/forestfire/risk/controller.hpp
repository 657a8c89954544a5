#pragma once

#include <array>
#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forestfire/config/rule_base.hpp"
#include "forestfire/fuzzy/risk_level.hpp"
#include "forestfire/risk/measurement.hpp"
#include "forestfire/risk/settings.hpp"

namespace forestfire::risk {

using fuzzy::RiskLevel;

struct Declaration {
  RiskLevel level = RiskLevel::nfr;
  Timestamp expiry{};

  bool active_at(Timestamp t) const { return t < expiry; }
  friend bool operator==(const Declaration&, const Declaration&) = default;
};

struct RiskAssessment {
  std::string area_id;
  std::string device_id;
  Timestamp timestamp{};
  double percentage = 0.0;
  RiskLevel level = RiskLevel::nfr;
  Window window = Window::all();
  std::size_t samples_averaged = 0;  // 0 on cold start
  bool cold_start = false;
  VariableValues last{};
  VariableValues averages{};
  std::array<fuzzy::LevelActivations, kVariableCount> activations{};
  std::array<bool, kVariableCount> clamped{};  // last or average outside the universe

  friend bool operator==(const RiskAssessment&, const RiskAssessment&) = default;
};

struct AreaState {
  std::string area_id;
  std::vector<Measurement> history;  // same local day, strictly increasing timestamps
  std::optional<Timestamp> last_timestamp;
  std::optional<std::int64_t> day;  // local day of `history`
  RiskLevel current_level = RiskLevel::nfr;
  std::optional<Declaration> declaration;
  std::optional<RiskAssessment> last_assessment;

  friend bool operator==(const AreaState&, const AreaState&) = default;
};

Window window_size(RiskLevel prior, bool declaration_active, const ControllerSettings& settings = {});

// Mean of the min(window, size) most recent values; nullopt for an empty
// series (cold start, the caller substitutes the incoming sample).
std::optional<double> compute_average(std::span<const double> series, Window window);

// Per-area risk controller over an immutable rule base. All members are
// const; the area state is passed in and returned updated, so one instance
// can serve every area from any thread.
class RiskController {
 public:
  explicit RiskController(std::shared_ptr<const config::RuleBase> rules);

  const config::RuleBase& rules() const { return *rules_; }

  // Throws InvalidMeasurement / StaleMeasurement. Rolls the state over first
  // when `m` falls on a later local day than the history.
  std::pair<RiskAssessment, AreaState> assess(const AreaState& state, const Measurement& m) const;

  // Throws std::invalid_argument for an NFR level or a non-positive ttl.
  AreaState apply_declaration(AreaState state, RiskLevel level, std::chrono::seconds ttl,
                              Timestamp now) const;

  AreaState rollover(AreaState state, std::int64_t new_day) const;

  Window window_for(const AreaState& state, Timestamp at) const;

  std::chrono::seconds recommended_cycle_period(RiskLevel level) const {
    return rules_->controller.cycle_periods[fuzzy::index_of(level)];
  }

 private:
  std::shared_ptr<const config::RuleBase> rules_;
};

}  // namespace forestfire::risk
