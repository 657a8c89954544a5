#include "forestfire/risk/controller.hpp"

#include <stdexcept>

#include "forestfire/error.hpp"
#include "forestfire/fuzzy/inference.hpp"

namespace forestfire::risk {

Window window_size(RiskLevel prior, bool declaration_active, const ControllerSettings& settings) {
  const Window base = settings.windows[fuzzy::index_of(prior)];
  if (!declaration_active) return base;
  const Window declared = Window::latest(settings.declaration_window);
  return declared < base ? declared : base;
}

std::optional<double> compute_average(std::span<const double> series, Window window) {
  if (series.empty()) return std::nullopt;
  const std::size_t n = window.effective(series.size());
  double sum = 0.0;
  for (std::size_t i = series.size() - n; i < series.size(); ++i) sum += series[i];
  return sum / static_cast<double>(n);
}

RiskController::RiskController(std::shared_ptr<const config::RuleBase> rules) : rules_(std::move(rules)) {
  if (!rules_) throw std::invalid_argument("RiskController needs a rule base");
}

Window RiskController::window_for(const AreaState& state, Timestamp at) const {
  const bool declared = state.declaration && state.declaration->active_at(at);
  return window_size(state.current_level, declared, rules_->controller);
}

AreaState RiskController::rollover(AreaState state, std::int64_t new_day) const {
  state.history.clear();
  state.current_level = RiskLevel::nfr;
  state.last_assessment.reset();
  state.day = new_day;
  return state;
}

AreaState RiskController::apply_declaration(AreaState state, RiskLevel level, std::chrono::seconds ttl,
                                            Timestamp now) const {
  if (level == RiskLevel::nfr) throw std::invalid_argument("an NFR declaration is not allowed");
  if (ttl.count() <= 0) throw std::invalid_argument("declaration ttl must be positive");
  state.declaration = Declaration{level, now + ttl};
  return state;
}

std::pair<RiskAssessment, AreaState> RiskController::assess(const AreaState& in, const Measurement& m) const {
  validate(m);
  if (!in.area_id.empty() && in.area_id != m.area_id) {
    throw InvalidMeasurement("measurement for area '" + m.area_id + "' sent to area '" + in.area_id + "'");
  }
  if (in.last_timestamp && m.timestamp <= *in.last_timestamp) {
    throw StaleMeasurement("timestamp " + format_timestamp(m.timestamp) + " is not after " +
                           format_timestamp(*in.last_timestamp) + " for area '" + m.area_id + "'");
  }

  AreaState state = in;
  state.area_id = m.area_id;
  const std::int64_t day = local_day(m.timestamp, rules_->controller.utc_offset(m.area_id));
  if (!state.day || day > *state.day) state = rollover(std::move(state), day);

  RiskAssessment out;
  out.area_id = m.area_id;
  out.device_id = m.device_id;
  out.timestamp = m.timestamp;
  out.window = window_for(state, m.timestamp);
  out.last = m.values;

  const std::size_t available = state.history.size();
  out.samples_averaged = out.window.effective(available);
  out.cold_start = available == 0;

  std::vector<double> series;
  series.reserve(out.samples_averaged);
  for (Variable v : kVariables) {
    const std::size_t i = index_of(v);
    const config::InputRules& rules = rules_->input(v);
    if (out.cold_start) {
      // No basis for a variation yet: only the no-risk consequent fires.
      out.averages[i] = m.values[i];
      out.activations[i][RiskLevel::nfr] = 1.0;
      out.clamped[i] = !rules.linguistic.universe().contains(m.values[i]);
      continue;
    }
    series.clear();
    for (std::size_t k = available - out.samples_averaged; k < available; ++k) {
      series.push_back(state.history[k].values[i]);
    }
    out.averages[i] = *compute_average(series, Window::all());
    const fuzzy::FuzzifiedValue last = fuzzy::fuzzify(rules.linguistic, m.values[i]);
    const fuzzy::FuzzifiedValue avg = fuzzy::fuzzify(rules.linguistic, out.averages[i]);
    out.clamped[i] = last.clamped || avg.clamped;
    out.activations[i] = fuzzy::infer(rules.fam, last, avg);
  }

  const fuzzy::AggregatedOutput aggregated =
      fuzzy::aggregate(out.activations, rules_->output, rules_->aggregation);
  out.percentage = fuzzy::defuzzify_centroid(aggregated, rules_->centroid_resolution);
  out.level = fuzzy::classify_level(out.percentage, rules_->output);

  state.history.push_back(m);
  state.last_timestamp = m.timestamp;
  state.current_level = out.level;
  state.last_assessment = out;
  return {std::move(out), std::move(state)};
}

}  // namespace forestfire::risk
