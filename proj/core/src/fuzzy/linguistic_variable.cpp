#include "forestfire/fuzzy/linguistic_variable.hpp"

#include <algorithm>
#include <cmath>

#include "forestfire/error.hpp"

namespace forestfire::fuzzy {
namespace {

// Every membership function is linear between consecutive breakpoints, so a
// sign change of any degree can only happen at a breakpoint. Testing the
// breakpoints and the midpoints between them decides coverage exactly.
std::vector<double> probe_points(const Universe& universe, const std::vector<Term>& terms) {
  std::vector<double> critical{universe.lower, universe.upper};
  for (const Term& term : terms) {
    for (double p : {term.shape.support_begin(), term.shape.plateau_begin(), term.shape.plateau_end(),
                     term.shape.support_end()}) {
      if (universe.contains(p)) critical.push_back(p);
    }
  }
  std::sort(critical.begin(), critical.end());
  critical.erase(std::unique(critical.begin(), critical.end()), critical.end());

  std::vector<double> probes = critical;
  for (std::size_t i = 1; i < critical.size(); ++i) {
    probes.push_back(0.5 * (critical[i - 1] + critical[i]));
  }
  return probes;
}

}  // namespace

LinguisticVariable::LinguisticVariable(std::string name, Universe universe, std::vector<Term> terms)
    : name_(std::move(name)), universe_(std::move(universe)), terms_(std::move(terms)) {
  if (!std::isfinite(universe_.lower) || !std::isfinite(universe_.upper) ||
      universe_.lower >= universe_.upper) {
    throw ConfigError("variable '" + name_ + "': universe must be a non-empty finite interval");
  }
  if (terms_.empty()) throw ConfigError("variable '" + name_ + "' has no terms");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    for (std::size_t j = i + 1; j < terms_.size(); ++j) {
      if (terms_[i].name == terms_[j].name) {
        throw ConfigError("variable '" + name_ + "': duplicate term '" + terms_[i].name + "'");
      }
    }
  }

  const std::vector<double> probes = probe_points(universe_, terms_);
  for (double x : probes) {
    const bool covered = std::any_of(terms_.begin(), terms_.end(),
                                     [x](const Term& t) { return t.shape(x) > 0.0; });
    if (!covered) {
      throw ConfigError("variable '" + name_ + "': no term covers x=" + std::to_string(x));
    }
  }
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    const Term& lo = terms_[i - 1];
    const Term& hi = terms_[i];
    const bool overlap = std::any_of(probes.begin(), probes.end(), [&](double x) {
      return lo.shape(x) > 0.0 && hi.shape(x) > 0.0;
    });
    if (!overlap) {
      throw ConfigError("variable '" + name_ + "': terms '" + lo.name + "' and '" + hi.name +
                        "' do not overlap");
    }
  }
}

std::optional<std::size_t> LinguisticVariable::term_index(std::string_view term) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].name == term) return i;
  }
  return std::nullopt;
}

std::optional<double> FuzzifiedValue::degree(std::string_view term) const {
  for (const TermDegree& d : degrees) {
    if (d.term == term) return d.degree;
  }
  return std::nullopt;
}

FuzzifiedValue fuzzify(const LinguisticVariable& variable, double x) {
  if (!std::isfinite(x)) {
    throw InvalidMeasurement("non-finite value for variable '" + variable.name() + "'");
  }
  FuzzifiedValue out;
  out.variable = variable.name();
  out.clamped = !variable.universe().contains(x);
  const double clamped = variable.universe().clamp(x);
  out.degrees.reserve(variable.size());
  for (const Term& term : variable.terms()) {
    out.degrees.push_back({term.name, term.shape(clamped)});
  }
  return out;
}

}  // namespace forestfire::fuzzy
