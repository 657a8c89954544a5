#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace forestfire::risk {

using Timestamp = std::chrono::sys_seconds;

// The seven monitored environmental variables, in wire and rule-base order.
enum class Variable : std::size_t {
  temperature = 0,  // degC
  humidity,         // %
  wind_speed,       // km/h
  rainfall,         // mm
  co2,              // ppm
  co,               // ppm
  o2,               // %
};

inline constexpr std::size_t kVariableCount = 7;
inline constexpr std::array<Variable, kVariableCount> kVariables{
    Variable::temperature, Variable::humidity, Variable::wind_speed, Variable::rainfall,
    Variable::co2,         Variable::co,       Variable::o2};

constexpr std::size_t index_of(Variable v) { return static_cast<std::size_t>(v); }
std::string_view to_string(Variable v);
std::optional<Variable> parse_variable(std::string_view name);

using VariableValues = std::array<double, kVariableCount>;

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct Measurement {
  std::string device_id;  // IMEI, 15 decimal digits
  std::string area_id;
  Timestamp timestamp{};
  GeoPoint location;
  double battery = 100.0;  // %
  VariableValues values{};

  double value(Variable v) const { return values[index_of(v)]; }
  double& value(Variable v) { return values[index_of(v)]; }

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

bool is_valid_imei(std::string_view id);

// Throws InvalidMeasurement on a bad IMEI, empty area, non-finite field or
// out-of-range battery.
void validate(const Measurement& m);

// ISO-8601 UTC with seconds precision, e.g. 2026-07-01T06:00:00Z.
std::string format_timestamp(Timestamp t);
// Throws InvalidMeasurement on anything other than the format above.
Timestamp parse_timestamp(std::string_view text);

// Calendar day index of `t` in a zone at `utc_offset` from UTC.
std::int64_t local_day(Timestamp t, std::chrono::minutes utc_offset);

void to_json(nlohmann::json& j, const Measurement& m);
void from_json(const nlohmann::json& j, Measurement& m);

// Canonical JSON bytes (sorted keys) used as the signed plaintext.
std::string serialize(const Measurement& m);
// Throws InvalidMeasurement on malformed input; the result is validated.
Measurement parse_measurement(std::string_view bytes);

}  // namespace forestfire::risk
