#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "forestfire/fuzzy/fam.hpp"
#include "forestfire/fuzzy/linguistic_variable.hpp"
#include "forestfire/fuzzy/risk_level.hpp"

namespace forestfire::fuzzy {

inline constexpr std::size_t kDefaultCentroidResolution = 1001;
inline constexpr std::size_t kMinCentroidResolution = 101;

// How the NFR activations of several variables combine. Risk levels above
// NFR always combine with max.
//
//  disjunctive: NFR = max over variables (plain max aggregation).
//  conjunctive: NFR = min over variables, i.e. the area is free of risk only
//               to the degree that every assessed variable is.
enum class NoRiskCombination { disjunctive, conjunctive };

struct AggregationOptions {
  NoRiskCombination no_risk = NoRiskCombination::conjunctive;
};

// Mamdani rule evaluation of one FAM: rule strength is min(last, avg), a
// level's activation is the max strength over the cells that map to it.
LevelActivations infer(const FamTable& table, const FuzzifiedValue& last, const FuzzifiedValue& avg);

class AggregatedOutput {
 public:
  AggregatedOutput(LevelActivations activations, const LinguisticVariable& output);

  const LevelActivations& activations() const { return activations_; }
  const Universe& universe() const { return universe_; }

  // Pointwise max over the output sets, each clipped at its activation.
  double envelope(double x) const;

  // Envelope on `count` uniform cell-centred points of the universe.
  std::vector<double> sample(std::size_t count) const;

 private:
  LevelActivations activations_;
  Universe universe_;
  std::vector<MembershipFunction> shapes_;  // indexed by RiskLevel
};

// Throws std::invalid_argument for an empty activation list and ConfigError
// when `output` is not the four-level risk variable.
AggregatedOutput aggregate(std::span<const LevelActivations> activations,
                           const LinguisticVariable& output, AggregationOptions options = {});

// Centre of gravity of the envelope sampled at the midpoints of `resolution`
// equal cells. An all-zero envelope yields 0 (no detected risk).
double defuzzify_centroid(const AggregatedOutput& aggregated,
                          std::size_t resolution = kDefaultCentroidResolution);

// Output term with the highest degree at p; ties go to the more severe level.
RiskLevel classify_level(double percentage, const LinguisticVariable& output);

// Checks that `output` has exactly the terms NFR, LFR, HFR, EFR in order.
void validate_output_variable(const LinguisticVariable& output);

}  // namespace forestfire::fuzzy
