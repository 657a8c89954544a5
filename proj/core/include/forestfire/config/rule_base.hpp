#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "forestfire/fuzzy/fam.hpp"
#include "forestfire/fuzzy/inference.hpp"
#include "forestfire/fuzzy/linguistic_variable.hpp"
#include "forestfire/risk/measurement.hpp"
#include "forestfire/risk/settings.hpp"

namespace forestfire::config {

struct InputRules {
  risk::Variable variable;
  fuzzy::LinguisticVariable linguistic;
  fuzzy::FamTable fam;
};

// Complete controller configuration: the seven input variables with their
// FAM tables, the output variable, aggregation options and the window /
// cycle-period schedule. Loaded from the versioned JSON rule-base file.
struct RuleBase {
  std::string version;
  std::vector<InputRules> inputs;  // indexed by risk::Variable
  fuzzy::LinguisticVariable output;
  fuzzy::AggregationOptions aggregation;
  std::size_t centroid_resolution = fuzzy::kDefaultCentroidResolution;
  risk::ControllerSettings controller;

  const InputRules& input(risk::Variable v) const { return inputs[risk::index_of(v)]; }

  static RuleBase from_json(const nlohmann::json& j);
  static RuleBase load(const std::filesystem::path& path);
};

// The rule base shipped as config/default-rulebase.json, compiled in.
const RuleBase& default_rule_base();
std::shared_ptr<const RuleBase> default_rule_base_ptr();
std::string_view default_rule_base_text();

}  // namespace forestfire::config
