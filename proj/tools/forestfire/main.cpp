#include <iostream>
#include <map>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("forestfire"));

  CLI::App app{"Forest-fire risk monitoring: key provisioning, simulation, ingest service and reports"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "forestfire 0.1.0");
  std::string level = "info";
  app.add_option("--log-level", level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::map<CLI::App*, forestfire::cli::Action> actions;
  for (auto add : {forestfire::cli::add_keygen, forestfire::cli::add_simulate, forestfire::cli::add_replay,
                   forestfire::cli::add_serve, forestfire::cli::add_report}) {
    const auto before = app.get_subcommands({}).size();
    auto action = add(app);
    actions[app.get_subcommands({}).at(before)] = std::move(action);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  spdlog::set_level(spdlog::level::from_str(level));

  try {
    return actions.at(app.get_subcommands().front())();
  } catch (const forestfire::cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
