#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forestfire/fuzzy/membership.hpp"

namespace forestfire::fuzzy {

struct Universe {
  double lower = 0.0;
  double upper = 0.0;
  std::string unit;

  double clamp(double x) const { return x < lower ? lower : (x > upper ? upper : x); }
  bool contains(double x) const { return x >= lower && x <= upper; }
};

struct Term {
  std::string name;
  MembershipFunction shape;
};

// A named quantity with fuzzy terms ordered from least to most severe.
//
// Construction rejects term lists that leave a point of the universe
// uncovered or that contain a pair of consecutive terms without overlap.
class LinguisticVariable {
 public:
  LinguisticVariable(std::string name, Universe universe, std::vector<Term> terms);

  const std::string& name() const { return name_; }
  const Universe& universe() const { return universe_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  std::optional<std::size_t> term_index(std::string_view term) const;

 private:
  std::string name_;
  Universe universe_;
  std::vector<Term> terms_;
};

struct TermDegree {
  std::string term;
  double degree = 0.0;
};

struct FuzzifiedValue {
  std::string variable;
  std::vector<TermDegree> degrees;  // one per term, in the variable's term order
  bool clamped = false;             // input was outside the universe

  // Degree of the named term; nullopt if the term does not belong to the variable.
  std::optional<double> degree(std::string_view term) const;
};

// Clamps x into the universe and evaluates every term. Throws
// InvalidMeasurement for NaN or infinite input.
FuzzifiedValue fuzzify(const LinguisticVariable& variable, double x);

}  // namespace forestfire::fuzzy
