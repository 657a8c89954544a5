#include "forestfire/config/rule_base.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "forestfire/error.hpp"

namespace forestfire::config {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "forestfire-rulebase";

fuzzy::MembershipFunction parse_shape(const json& j, const std::string& where) {
  const std::string shape = j.at("shape").get<std::string>();
  const std::vector<double> points = j.at("points").get<std::vector<double>>();
  if (shape == "triangle") {
    if (points.size() != 3) throw ConfigError(where + ": a triangle needs 3 points");
    return fuzzy::MembershipFunction::triangle(points[0], points[1], points[2]);
  }
  if (shape == "trapezoid") {
    if (points.size() != 4) throw ConfigError(where + ": a trapezoid needs 4 points");
    return fuzzy::MembershipFunction::trapezoid(points[0], points[1], points[2], points[3]);
  }
  throw ConfigError(where + ": unknown shape '" + shape + "'");
}

fuzzy::LinguisticVariable parse_variable(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  const auto universe = j.at("universe").get<std::vector<double>>();
  if (universe.size() != 2) throw ConfigError("variable '" + name + "': universe needs [lower, upper]");
  std::vector<fuzzy::Term> terms;
  for (const json& t : j.at("terms")) {
    const std::string term = t.at("name").get<std::string>();
    terms.push_back({term, parse_shape(t, name + "/" + term)});
  }
  return fuzzy::LinguisticVariable(name, {universe[0], universe[1], j.value("unit", "")},
                                   std::move(terms));
}

fuzzy::FamTable parse_fam(const json& j, const fuzzy::LinguisticVariable& variable) {
  std::vector<std::string> names;
  for (const fuzzy::Term& t : variable.terms()) names.push_back(t.name);

  const json& rows = j.at("cells");
  if (!rows.is_array() || rows.size() != names.size()) {
    throw ConfigError("FAM for '" + variable.name() + "' needs one row per term");
  }
  std::vector<fuzzy::RiskLevel> cells;
  for (const json& row : rows) {
    if (!row.is_array() || row.size() != names.size()) {
      throw ConfigError("FAM for '" + variable.name() + "' needs one column per term");
    }
    for (const json& cell : row) {
      const auto level = fuzzy::parse_risk_level(cell.get<std::string>());
      if (!level) throw ConfigError("FAM for '" + variable.name() + "': bad level " + cell.dump());
      cells.push_back(*level);
    }
  }
  fuzzy::FamTable table(variable.name(), names, names, std::move(cells));
  if (!table.is_severity_monotone()) {
    throw ConfigError("FAM for '" + variable.name() + "' is not monotone in severity");
  }
  return table;
}

risk::Window parse_window(const json& j) {
  if (j.is_string() && j.get<std::string>() == "all") return risk::Window::all();
  if (j.is_number_unsigned() && j.get<std::size_t>() > 0) return risk::Window::latest(j.get<std::size_t>());
  throw ConfigError("window must be \"all\" or a positive integer, got " + j.dump());
}

risk::ControllerSettings parse_controller(const json& j) {
  risk::ControllerSettings s;
  if (j.contains("windows")) {
    for (fuzzy::RiskLevel level : fuzzy::kRiskLevels) {
      s.windows[fuzzy::index_of(level)] = parse_window(j.at("windows").at(std::string(to_string(level))));
    }
  }
  s.declaration_window = j.value("declaration_window", s.declaration_window);
  if (s.declaration_window == 0) throw ConfigError("declaration_window must be positive");
  if (j.contains("cycle_period_seconds")) {
    for (fuzzy::RiskLevel level : fuzzy::kRiskLevels) {
      const auto secs = j.at("cycle_period_seconds").at(std::string(to_string(level))).get<long>();
      if (secs <= 0) throw ConfigError("cycle periods must be positive");
      s.cycle_periods[fuzzy::index_of(level)] = std::chrono::seconds{secs};
    }
  }
  if (j.contains("default_utc_offset")) {
    s.default_utc_offset = risk::parse_utc_offset(j.at("default_utc_offset").get<std::string>());
  }
  if (j.contains("areas")) {
    for (const auto& [area, cfg] : j.at("areas").items()) {
      s.area_utc_offsets[area] = risk::parse_utc_offset(cfg.at("utc_offset").get<std::string>());
    }
  }
  return s;
}

}  // namespace

RuleBase RuleBase::from_json(const json& j) {
  try {
    if (j.value("format", "") != kFormat) {
      throw ConfigError("not a rule-base file (format must be \"forestfire-rulebase\")");
    }
    const std::string version = j.at("version").get<std::string>();
    if (version.empty() || version[0] != '1') {
      throw ConfigError("unsupported rule-base version " + version);
    }

    fuzzy::LinguisticVariable output = parse_variable(j.at("output"));
    fuzzy::validate_output_variable(output);

    std::vector<std::optional<InputRules>> slots(risk::kVariableCount);
    for (const json& input : j.at("inputs")) {
      const std::string name = input.at("name").get<std::string>();
      const auto variable = risk::parse_variable(name);
      if (!variable) throw ConfigError("unknown input variable '" + name + "'");
      if (slots[risk::index_of(*variable)]) throw ConfigError("input '" + name + "' defined twice");
      fuzzy::LinguisticVariable linguistic = parse_variable(input);
      fuzzy::FamTable fam = parse_fam(input.at("fam"), linguistic);
      slots[risk::index_of(*variable)].emplace(InputRules{*variable, std::move(linguistic), std::move(fam)});
    }
    std::vector<InputRules> inputs;
    for (risk::Variable v : risk::kVariables) {
      if (!slots[risk::index_of(v)]) {
        throw ConfigError("rule base lacks input '" + std::string(risk::to_string(v)) + "'");
      }
      inputs.push_back(std::move(*slots[risk::index_of(v)]));
    }

    fuzzy::AggregationOptions aggregation;
    std::size_t resolution = fuzzy::kDefaultCentroidResolution;
    if (j.contains("aggregation")) {
      const json& a = j.at("aggregation");
      const std::string mode = a.value("no_risk_combination", "conjunctive");
      if (mode == "conjunctive") {
        aggregation.no_risk = fuzzy::NoRiskCombination::conjunctive;
      } else if (mode == "disjunctive") {
        aggregation.no_risk = fuzzy::NoRiskCombination::disjunctive;
      } else {
        throw ConfigError("no_risk_combination must be conjunctive or disjunctive");
      }
      resolution = a.value("centroid_resolution", resolution);
      if (resolution < fuzzy::kMinCentroidResolution) {
        throw ConfigError("centroid_resolution must be at least 101");
      }
    }

    return RuleBase{version,
                    std::move(inputs),
                    std::move(output),
                    aggregation,
                    resolution,
                    j.contains("controller") ? parse_controller(j.at("controller"))
                                             : risk::ControllerSettings{}};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed rule base: ") + e.what());
  }
}

RuleBase RuleBase::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule base " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("rule base " + path.string() + " is not valid JSON");
  return from_json(j);
}

std::shared_ptr<const RuleBase> default_rule_base_ptr() {
  static const std::shared_ptr<const RuleBase> rules =
      std::make_shared<const RuleBase>(RuleBase::from_json(json::parse(default_rule_base_text())));
  return rules;
}

const RuleBase& default_rule_base() { return *default_rule_base_ptr(); }

}  // namespace forestfire::config
