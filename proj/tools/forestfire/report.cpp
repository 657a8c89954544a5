#include <iostream>

#include "commands.hpp"
#include "forestfire/ingest/event_log.hpp"
#include "forestfire/ingest/report.hpp"

namespace forestfire::cli {

namespace {

struct ReportArgs {
  std::string log;
  std::string area;
  std::string format = "csv";
};

}  // namespace

Action add_report(CLI::App& app) {
  auto args = std::make_shared<ReportArgs>();
  auto* cmd = app.add_subcommand("report", "Export an area's assessments from a service event log");
  cmd->add_option("--log", args->log, "Service event log")->required()->check(CLI::ExistingFile);
  cmd->add_option("--area", args->area, "Area id")->required();
  cmd->add_option("--format", args->format, "Output format")->capture_default_str()->check(CLI::IsMember({"csv"}));

  return [args] {
    const auto log = ingest::EventLog::read(args->log);
    ingest::write_area_report(log, args->area, std::cout);
    return 0;
  };
}

}  // namespace forestfire::cli
