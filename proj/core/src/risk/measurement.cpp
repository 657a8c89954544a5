#include "forestfire/risk/measurement.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "forestfire/error.hpp"

namespace forestfire::risk {

namespace {
constexpr std::array<std::string_view, kVariableCount> kNames{
    "temperature", "humidity", "wind_speed", "rainfall", "co2", "co", "o2"};
}

std::string_view to_string(Variable v) { return kNames[index_of(v)]; }

std::optional<Variable> parse_variable(std::string_view name) {
  for (Variable v : kVariables) {
    if (kNames[index_of(v)] == name) return v;
  }
  return std::nullopt;
}

bool is_valid_imei(std::string_view id) {
  if (id.size() != 15) return false;
  for (char c : id) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

void validate(const Measurement& m) {
  if (!is_valid_imei(m.device_id)) {
    throw InvalidMeasurement("device id '" + m.device_id + "' is not a 15-digit IMEI");
  }
  if (m.area_id.empty()) throw InvalidMeasurement("measurement has no area id");
  for (Variable v : kVariables) {
    if (!std::isfinite(m.value(v))) {
      throw InvalidMeasurement("non-finite " + std::string(to_string(v)));
    }
  }
  if (!std::isfinite(m.location.latitude) || !std::isfinite(m.location.longitude) ||
      std::abs(m.location.latitude) > 90.0 || std::abs(m.location.longitude) > 180.0) {
    throw InvalidMeasurement("location out of range");
  }
  if (!std::isfinite(m.battery) || m.battery < 0.0 || m.battery > 100.0) {
    throw InvalidMeasurement("battery level outside [0, 100]");
  }
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const sys_days day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss<seconds> hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char z = 0;
  const std::string copy(text);
  if (text.size() != 20 ||
      std::sscanf(copy.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c", &y, &mo, &d, &h, &mi, &s, &z) != 7 ||
      z != 'Z') {
    throw InvalidMeasurement("timestamp '" + copy + "' is not YYYY-MM-DDTHH:MM:SSZ");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw InvalidMeasurement("timestamp '" + copy + "' is not a valid instant");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::int64_t local_day(Timestamp t, std::chrono::minutes utc_offset) {
  using namespace std::chrono;
  return floor<days>(t + utc_offset).time_since_epoch().count();
}

void to_json(nlohmann::json& j, const Measurement& m) {
  j = nlohmann::json::object();
  j["device_id"] = m.device_id;
  j["area_id"] = m.area_id;
  j["timestamp"] = format_timestamp(m.timestamp);
  j["lat"] = m.location.latitude;
  j["lon"] = m.location.longitude;
  j["battery"] = m.battery;
  for (Variable v : kVariables) j[std::string(to_string(v))] = m.value(v);
}

void from_json(const nlohmann::json& j, Measurement& m) {
  try {
    m.device_id = j.at("device_id").get<std::string>();
    m.area_id = j.at("area_id").get<std::string>();
    m.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
    m.location.latitude = j.at("lat").get<double>();
    m.location.longitude = j.at("lon").get<double>();
    m.battery = j.at("battery").get<double>();
    for (Variable v : kVariables) m.value(v) = j.at(std::string(to_string(v))).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidMeasurement(std::string("malformed measurement: ") + e.what());
  }
}

std::string serialize(const Measurement& m) {
  nlohmann::json j = m;
  return j.dump();
}

Measurement parse_measurement(std::string_view bytes) {
  const nlohmann::json j = nlohmann::json::parse(bytes, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InvalidMeasurement("measurement is not a JSON object");
  Measurement m = j.get<Measurement>();
  validate(m);
  return m;
}

}  // namespace forestfire::risk
