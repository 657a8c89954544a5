#include "forestfire/fuzzy/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "forestfire/error.hpp"

namespace forestfire::fuzzy {
namespace {

// Degrees of `value` reordered to follow `names`.
std::vector<double> align(const FuzzifiedValue& value, const std::vector<std::string>& names,
                          const std::string& table) {
  std::vector<double> out(names.size(), 0.0);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i < value.degrees.size() && value.degrees[i].term == names[i]) {
      out[i] = value.degrees[i].degree;
      continue;
    }
    const auto d = value.degree(names[i]);
    if (!d) {
      throw ConfigError("FAM for '" + table + "': input '" + value.variable + "' has no term '" +
                        names[i] + "'");
    }
    out[i] = *d;
  }
  return out;
}

}  // namespace

LevelActivations infer(const FamTable& table, const FuzzifiedValue& last, const FuzzifiedValue& avg) {
  const std::vector<double> row_degrees = align(last, table.rows(), table.variable());
  const std::vector<double> column_degrees = align(avg, table.columns(), table.variable());

  LevelActivations activations;
  for (std::size_t r = 0; r < row_degrees.size(); ++r) {
    if (row_degrees[r] <= 0.0) continue;
    for (std::size_t c = 0; c < column_degrees.size(); ++c) {
      const double strength = std::min(row_degrees[r], column_degrees[c]);
      double& slot = activations[table.at(r, c)];
      slot = std::max(slot, strength);
    }
  }
  return activations;
}

void validate_output_variable(const LinguisticVariable& output) {
  if (output.size() != kRiskLevelCount) {
    throw ConfigError("output variable must have exactly four terms NFR, LFR, HFR, EFR");
  }
  for (RiskLevel level : kRiskLevels) {
    if (output.terms()[index_of(level)].name != to_string(level)) {
      throw ConfigError("output term " + std::to_string(index_of(level)) + " must be named " +
                        std::string(to_string(level)));
    }
  }
}

AggregatedOutput::AggregatedOutput(LevelActivations activations, const LinguisticVariable& output)
    : activations_(activations), universe_(output.universe()) {
  validate_output_variable(output);
  for (double& a : activations_.values) {
    if (!std::isfinite(a)) throw std::invalid_argument("activation must be finite");
    a = std::clamp(a, 0.0, 1.0);
  }
  shapes_.reserve(kRiskLevelCount);
  for (const Term& term : output.terms()) shapes_.push_back(term.shape);
}

double AggregatedOutput::envelope(double x) const {
  double mu = 0.0;
  for (std::size_t k = 0; k < kRiskLevelCount; ++k) {
    const double a = activations_.values[k];
    if (a <= 0.0) continue;
    mu = std::max(mu, std::min(a, shapes_[k](x)));
  }
  return mu;
}

std::vector<double> AggregatedOutput::sample(std::size_t count) const {
  std::vector<double> out(count);
  const double step = (universe_.upper - universe_.lower) / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = envelope(universe_.lower + (static_cast<double>(i) + 0.5) * step);
  }
  return out;
}

AggregatedOutput aggregate(std::span<const LevelActivations> activations, const LinguisticVariable& output,
                           AggregationOptions options) {
  if (activations.empty()) {
    throw std::invalid_argument("aggregate needs the activations of at least one variable");
  }
  LevelActivations combined;
  combined[RiskLevel::nfr] = activations.front()[RiskLevel::nfr];
  for (const LevelActivations& variable : activations) {
    for (RiskLevel level : kRiskLevels) {
      double& slot = combined[level];
      if (level == RiskLevel::nfr && options.no_risk == NoRiskCombination::conjunctive) {
        slot = std::min(slot, variable[level]);
      } else {
        slot = std::max(slot, variable[level]);
      }
    }
  }
  return AggregatedOutput(combined, output);
}

double defuzzify_centroid(const AggregatedOutput& aggregated, std::size_t resolution) {
  if (resolution < kMinCentroidResolution) {
    throw std::invalid_argument("centroid resolution must be at least 101 samples");
  }
  const Universe& u = aggregated.universe();
  const double step = (u.upper - u.lower) / static_cast<double>(resolution);
  double moment = 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i < resolution; ++i) {
    const double x = u.lower + (static_cast<double>(i) + 0.5) * step;
    const double mu = aggregated.envelope(x);
    moment += x * mu;
    area += mu;
  }
  if (area <= 0.0) return 0.0;
  return std::clamp(moment / area, u.lower, u.upper);
}

RiskLevel classify_level(double percentage, const LinguisticVariable& output) {
  validate_output_variable(output);
  const double p = output.universe().clamp(percentage);
  RiskLevel best = RiskLevel::nfr;
  double best_degree = -1.0;
  for (RiskLevel level : kRiskLevels) {
    const double degree = output.terms()[index_of(level)].shape(p);
    if (degree >= best_degree) {
      best = level;
      best_degree = degree;
    }
  }
  return best;
}

}  // namespace forestfire::fuzzy
