#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "forestfire/ingest/ingest_core.hpp"
#include "forestfire/service/auth.hpp"

namespace forestfire::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  std::filesystem::path log_path = "forestfire-events.log";
  std::filesystem::path registry_path = "registry.json";
  std::optional<std::filesystem::path> rulebase_path;  // compiled-in default when unset
  ingest::ClockMode clock = ingest::ClockMode::wall;
  std::chrono::seconds token_ttl{3600};
  bool fsync = true;
  std::size_t event_retention = 10000;
  std::chrono::milliseconds keepalive{15000};
  std::size_t max_payload = 64 * 1024;
  std::vector<User> users;

  static ServiceConfig from_json(const nlohmann::json& j);
  static ServiceConfig load(const std::filesystem::path& path);
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

EnvLookup process_env();

// FORESTFIRE_HOST, _PORT, _LOG, _REGISTRY, _RULEBASE, _CLOCK, _TOKEN_TTL and
// _FSYNC override the matching fields. FORESTFIRE_ADMIN_PASSWORD,
// _OPERATOR_PASSWORD and _VIEWER_PASSWORD seed (or replace) the users
// "admin", "operator" and "viewer". Throws ConfigError on bad values.
void apply_env(ServiceConfig& config, const EnvLookup& env = process_env());

ingest::ClockMode parse_clock_mode(std::string_view text);

}  // namespace forestfire::service
