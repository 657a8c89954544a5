#include <iostream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "forestfire/error.hpp"
#include "forestfire/sim/trace.hpp"

namespace forestfire::cli {

namespace {

struct ReplayArgs {
  std::string trace;
  std::string service;
  std::optional<std::string> token;
  std::optional<std::string> username;
  std::optional<std::string> password;
  bool fast = false;
  double speed = 1.0;
};

std::string login(httplib::Client& client, const std::string& user, const std::string& password) {
  const auto res = client.Post("/auth/login", nlohmann::json{{"username", user}, {"password", password}}.dump(),
                               "application/json");
  if (!res) throw Error("cannot reach service: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error("login failed with HTTP " + std::to_string(res->status));
  return nlohmann::json::parse(res->body).at("token");
}

std::string error_code(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  return j.is_object() ? j.value("code", "") : "";
}

}  // namespace

Action add_replay(CLI::App& app) {
  auto args = std::make_shared<ReplayArgs>();
  auto* cmd = app.add_subcommand("replay", "Post a trace's originated envelopes to a running service");
  cmd->add_option("--trace", args->trace, "Trace written by simulate")->required()->check(CLI::ExistingFile);
  cmd->add_option("--service", args->service, "Service base URL, e.g. http://127.0.0.1:8080")->required();
  auto* token = cmd->add_option("--token", args->token, "Bearer token (operator role)")->envname("FORESTFIRE_TOKEN");
  auto* user = cmd->add_option("--username", args->username, "Log in instead of passing a token");
  cmd->add_option("--password", args->password, "Password for --username")
      ->envname("FORESTFIRE_PASSWORD")
      ->needs(user);
  token->excludes(user);
  cmd->add_flag("--fast", args->fast, "Post back to back instead of preserving trace timing");
  cmd->add_option("--speed", args->speed, "Time compression factor when not --fast")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  return [args] {
    if (!args->token && !args->username) throw UsageError("pass --token or --username");
    if (args->username && !args->password) throw UsageError("--username needs --password");
    const auto envelopes = sim::read_trace_envelopes(std::filesystem::path(args->trace));

    httplib::Client client(args->service);
    if (!client.is_valid()) throw UsageError("invalid service URL '" + args->service + "'");
    client.set_read_timeout(30, 0);
    client.set_keep_alive(true);
    client.set_tcp_nodelay(true);
    const auto token = args->token ? *args->token : login(client, *args->username, *args->password);
    const httplib::Headers headers{{"Authorization", "Bearer " + token}};

    std::size_t accepted = 0, duplicate = 0, rejected = 0;
    const auto started = std::chrono::steady_clock::now();
    const auto t0 = envelopes.empty() ? 0 : envelopes.front().t_ms;
    for (const auto& e : envelopes) {
      if (!args->fast) {
        const auto offset = std::chrono::duration<double, std::milli>((e.t_ms - t0) / args->speed);
        std::this_thread::sleep_until(started + std::chrono::duration_cast<std::chrono::nanoseconds>(offset));
      }
      const auto res = client.Post("/packages", headers, reinterpret_cast<const char*>(e.envelope.data()),
                                   e.envelope.size(), "application/octet-stream");
      if (!res) throw Error("posting " + e.package + " failed: " + httplib::to_string(res.error()));
      const auto code = res->status == 200 ? "" : error_code(res->body);
      if (code == "unauthorized" || res->status == 403 || res->status >= 500) {
        throw Error("service refused " + e.package + " with HTTP " + std::to_string(res->status) + " " + code);
      }
      if (res->status != 200) {
        ++rejected;
        spdlog::warn("{} from {} rejected: HTTP {} {}", e.package, e.node, res->status, code);
      } else if (nlohmann::json::parse(res->body).value("status", "") == "duplicate") {
        ++duplicate;
      } else {
        ++accepted;
      }
    }
    std::cout << "posted " << envelopes.size() << ": accepted " << accepted << ", duplicate " << duplicate
              << ", rejected " << rejected << "\n";
    return 0;
  };
}

}  // namespace forestfire::cli
