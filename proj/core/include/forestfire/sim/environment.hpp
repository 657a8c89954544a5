#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "forestfire/sim/scenario.hpp"

namespace forestfire::sim {

// Uniform double in [0, 1) from the top 53 bits; unlike the standard
// distributions this is identical on every standard library.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

class EnvironmentModel {
 public:
  explicit EnvironmentModel(EnvironmentSpec spec) : spec_(std::move(spec)) {}

  // Noise-free values for an area at t_s seconds after scenario start.
  risk::VariableValues truth(std::string_view area_id, std::int64_t t_s) const;

  // truth() with independent multiplicative noise per variable.
  risk::VariableValues sample(std::string_view area_id, std::int64_t t_s, std::mt19937_64& rng) const;

  const EnvironmentSpec& spec() const { return spec_; }

 private:
  EnvironmentSpec spec_;
};

}  // namespace forestfire::sim
