#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "forestfire/config/rule_base.hpp"
#include "forestfire/error.hpp"
#include "forestfire/ingest/event_log.hpp"
#include "forestfire/sim/simulator.hpp"

namespace forestfire::cli {

namespace {

struct SimulateArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> log;
  std::optional<std::string> registry_out;
  std::optional<std::string> rulebase;
  bool force = false;
};

// Written next to the target and renamed into place, so a failed run
// leaves nothing behind.
void write_atomically(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

void refuse_existing(const std::optional<std::string>& path, bool force, const char* flag) {
  if (!path || !std::filesystem::exists(*path)) return;
  if (!force) throw UsageError(*path + " exists (" + flag + "); pass --force to overwrite");
  std::filesystem::remove(*path);
}

}  // namespace

Action add_simulate(CLI::App& app) {
  auto args = std::make_shared<SimulateArgs>();
  auto* cmd = app.add_subcommand("simulate", "Run a sensor-network scenario and write its trace");
  cmd->add_option("--scenario", args->scenario, "Scenario JSON file")->required();
  cmd->add_option("--seed", args->seed, "Override the scenario seed");
  cmd->add_option("--out", args->out, "Trace file (JSON lines)")->required();
  cmd->add_option("--log", args->log, "Also persist the in-process service event log here");
  cmd->add_option("--registry-out", args->registry_out, "Write the scenario's device registry here");
  cmd->add_option("--rulebase", args->rulebase, "Rule-base file (default: compiled-in)");
  cmd->add_flag("--force", args->force, "Overwrite existing --log and --registry-out files");

  return [args] {
    refuse_existing(args->log, args->force, "--log");
    if (args->registry_out && std::filesystem::exists(*args->registry_out) && !args->force) {
      throw UsageError(*args->registry_out + " exists (--registry-out); pass --force to overwrite");
    }
    auto scenario = sim::Scenario::load(args->scenario);
    auto rules = args->rulebase ? std::make_shared<const config::RuleBase>(config::RuleBase::load(*args->rulebase))
                                : config::default_rule_base_ptr();
    sim::SimOptions options;
    options.seed = args->seed;
    if (args->log) options.log = ingest::EventLog::open(*args->log, false);

    sim::Simulator simulator(std::move(scenario), std::move(rules), std::move(options));
    const auto result = simulator.run();
    write_atomically(args->out, result.trace_text());
    if (args->registry_out) simulator.registry().save(*args->registry_out, args->force);

    const auto& c = result.counters;
    std::cout << "seed " << simulator.seed() << ": originated " << c.originated << ", delivered " << c.delivered
              << ", buffered " << c.buffered << ", dropped-ttl " << c.dropped_ttl << ", rejected " << c.rejected
              << ", suppressed " << c.suppressed << ", duplicate drops " << c.duplicate_drops << ", assessments "
              << c.assessments << "\n";
    return 0;
  };
}

}  // namespace forestfire::cli
