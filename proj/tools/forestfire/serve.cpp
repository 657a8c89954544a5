#include <csignal>
#include <fstream>
#include <iostream>

#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "forestfire/error.hpp"
#include "forestfire/service/server.hpp"

namespace forestfire::cli {

namespace {

struct ServeArgs {
  std::optional<std::string> config;
  std::optional<std::string> host;
  std::optional<std::uint16_t> port;
  std::optional<std::string> log;
  std::optional<std::string> registry;
  std::optional<std::string> rulebase;
  std::optional<std::string> clock;
  std::optional<std::string> ready_file;
  bool no_fsync = false;
};

}  // namespace

Action add_serve(CLI::App& app) {
  auto args = std::make_shared<ServeArgs>();
  auto* cmd = app.add_subcommand("serve", "Run the ingest service until SIGINT or SIGTERM");
  cmd->add_option("--config", args->config, "Service config JSON")->check(CLI::ExistingFile);
  cmd->add_option("--host", args->host, "Bind address");
  cmd->add_option("--port", args->port, "Port, 0 for any free port");
  cmd->add_option("--log", args->log, "Event log path");
  cmd->add_option("--registry", args->registry, "Device registry path");
  cmd->add_option("--rulebase", args->rulebase, "Rule-base path");
  cmd->add_option("--clock", args->clock, "wall or data")->check(CLI::IsMember({"wall", "data"}));
  cmd->add_option("--ready-file", args->ready_file, "Write the bound port here once listening");
  cmd->add_flag("--no-fsync", args->no_fsync, "Skip fdatasync after each log append");

  return [args] {
    // Precedence: config file, then environment, then flags.
    auto config = args->config ? service::ServiceConfig::load(*args->config) : service::ServiceConfig{};
    service::apply_env(config);
    if (args->host) config.host = *args->host;
    if (args->port) config.port = *args->port;
    if (args->log) config.log_path = *args->log;
    if (args->registry) config.registry_path = *args->registry;
    if (args->rulebase) config.rulebase_path = *args->rulebase;
    if (args->clock) config.clock = service::parse_clock_mode(*args->clock);
    if (args->no_fsync) config.fsync = false;
    if (config.users.empty()) spdlog::warn("no users configured; only /health will be usable");

    // Blocked before any server thread starts so only sigwait sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    service::Server server(config);
    const int port = server.start();
    if (args->ready_file) {
      const auto tmp = *args->ready_file + ".tmp";
      std::ofstream(tmp) << port << "\n";
      std::filesystem::rename(tmp, *args->ready_file);
    }
    std::cout << "listening on " << config.host << ":" << port << std::endl;

    int received = 0;
    sigwait(&signals, &received);
    spdlog::info("signal {}, shutting down", received);
    server.stop();
    return 0;
  };
}

}  // namespace forestfire::cli
