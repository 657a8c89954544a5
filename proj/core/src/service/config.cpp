#include "forestfire/service/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "forestfire/error.hpp"

namespace forestfire::service {

namespace {

template <typename T>
T parse_number(std::string_view name, std::string_view text) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ConfigError(std::string(name) + ": not a valid number: '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view name, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError(std::string(name) + ": expected a boolean, got '" + std::string(text) + "'");
}

std::chrono::seconds positive_seconds(std::string_view name, std::int64_t v) {
  if (v <= 0) throw ConfigError(std::string(name) + " must be positive");
  return std::chrono::seconds(v);
}

}  // namespace

ingest::ClockMode parse_clock_mode(std::string_view text) {
  if (text == "wall") return ingest::ClockMode::wall;
  if (text == "data") return ingest::ClockMode::data;
  throw ConfigError("clock must be 'wall' or 'data', got '" + std::string(text) + "'");
}

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j) {
  ServiceConfig c;
  try {
    if (!j.is_object()) throw ConfigError("service config must be a JSON object");
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    if (j.contains("log_path")) c.log_path = j.at("log_path").get<std::string>();
    if (j.contains("registry_path")) c.registry_path = j.at("registry_path").get<std::string>();
    if (j.contains("rulebase_path")) c.rulebase_path = j.at("rulebase_path").get<std::string>();
    if (j.contains("clock")) c.clock = parse_clock_mode(j.at("clock").get<std::string>());
    if (j.contains("token_ttl_seconds")) {
      c.token_ttl = positive_seconds("token_ttl_seconds", j.at("token_ttl_seconds").get<std::int64_t>());
    }
    c.fsync = j.value("fsync", c.fsync);
    c.event_retention = j.value("event_retention", c.event_retention);
    if (j.contains("keepalive_seconds")) {
      c.keepalive = positive_seconds("keepalive_seconds", j.at("keepalive_seconds").get<std::int64_t>());
    }
    c.max_payload = j.value("max_payload_bytes", c.max_payload);
    for (const auto& u : j.value("users", nlohmann::json::array())) {
      const auto role_text = u.at("role").get<std::string>();
      const auto role = parse_role(role_text);
      if (!role) throw ConfigError("unknown role '" + role_text + "'");
      c.users.push_back({u.at("username").get<std::string>(), *role, u.at("password_hash").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("service config: ") + e.what());
  }
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open service config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

EnvLookup process_env() {
  return [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

void apply_env(ServiceConfig& c, const EnvLookup& env) {
  if (auto v = env("FORESTFIRE_HOST")) c.host = *v;
  if (auto v = env("FORESTFIRE_PORT")) c.port = parse_number<std::uint16_t>("FORESTFIRE_PORT", *v);
  if (auto v = env("FORESTFIRE_LOG")) c.log_path = *v;
  if (auto v = env("FORESTFIRE_REGISTRY")) c.registry_path = *v;
  if (auto v = env("FORESTFIRE_RULEBASE")) c.rulebase_path = *v;
  if (auto v = env("FORESTFIRE_CLOCK")) c.clock = parse_clock_mode(*v);
  if (auto v = env("FORESTFIRE_TOKEN_TTL")) {
    c.token_ttl = positive_seconds("FORESTFIRE_TOKEN_TTL", parse_number<std::int64_t>("FORESTFIRE_TOKEN_TTL", *v));
  }
  if (auto v = env("FORESTFIRE_FSYNC")) c.fsync = parse_bool("FORESTFIRE_FSYNC", *v);

  const std::pair<const char*, Role> seeded[] = {
      {"FORESTFIRE_ADMIN_PASSWORD", Role::admin},
      {"FORESTFIRE_OPERATOR_PASSWORD", Role::operator_},
      {"FORESTFIRE_VIEWER_PASSWORD", Role::viewer},
  };
  for (const auto& [name, role] : seeded) {
    const auto password = env(name);
    if (!password) continue;
    if (password->empty()) throw ConfigError(std::string(name) + " is empty");
    std::erase_if(c.users, [&](const User& u) { return u.username == to_string(role); });
    c.users.push_back({std::string(to_string(role)), role, hash_password(*password)});
  }
}

}  // namespace forestfire::service
