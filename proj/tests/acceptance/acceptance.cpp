// Runs every primary acceptance criterion and prints one PASS/FAIL line each.
//
//   acceptance --cli <path to forestfire> [--only N]...
//
// Criteria 8 and 9 drive real `forestfire serve` and `forestfire replay`
// processes; 9 kills the service with SIGKILL while a replay is in flight.

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <csignal>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "forestfire/config/rule_base.hpp"
#include "forestfire/crypto/aes_cbc.hpp"
#include "forestfire/crypto/key_pool.hpp"
#include "forestfire/crypto/lamport.hpp"
#include "forestfire/crypto/merkle.hpp"
#include "forestfire/crypto/sha256.hpp"
#include "forestfire/fuzzy/inference.hpp"
#include "forestfire/ingest/event_log.hpp"
#include "forestfire/risk/controller.hpp"
#include "forestfire/sim/simulator.hpp"
#include "forestfire/sim/topology.hpp"
#include "golden.hpp"
#include "oracles.hpp"

extern char** environ;

namespace ff = forestfire;
namespace fs = std::filesystem;
using nlohmann::json;
using namespace std::chrono_literals;
using ff::fuzzy::RiskLevel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

fs::path source_path(std::string_view rel) { return fs::path(FORESTFIRE_SOURCE_DIR) / rel; }

ff::sim::SimResult simulate(ff::sim::Scenario s, std::optional<std::uint64_t> seed = {}) {
  ff::sim::Simulator sim(std::move(s), ff::config::default_rule_base_ptr(), {seed, nullptr});
  return sim.run();
}

// --- 1 ---------------------------------------------------------------------

Outcome fam_fidelity() {
  const auto& t = ff::config::default_rule_base().input(ff::risk::Variable::co2).fam;
  int matched = 0;
  std::string first_miss;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      const auto got = ff::fuzzy::to_string(t.lookup(ff::test::kCo2Terms[r], ff::test::kCo2Terms[c]));
      if (got == ff::test::kCo2Fam[r][c]) {
        ++matched;
      } else if (first_miss.empty()) {
        first_miss = std::string(ff::test::kCo2Terms[r]) + "/" + std::string(ff::test::kCo2Terms[c]);
      }
    }
  }
  const bool shape = t.rows().size() == 4 && t.columns().size() == 4;
  return {matched == 16 && shape,
          std::to_string(matched) + "/16 CO2 cells match" + (first_miss.empty() ? "" : ", first miss " + first_miss)};
}

// --- 2 ---------------------------------------------------------------------

Outcome centroid_accuracy() {
  const auto t0 = Clock::now();
  const auto& out = ff::config::default_rule_base().output;
  std::mt19937_64 rng(20260701);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    ff::fuzzy::LevelActivations a;
    // Every fourth vector zeroes one level so sparse envelopes are covered.
    for (auto& v : a.values) v = u(rng);
    if (i % 4 == 0) a.values[static_cast<std::size_t>(i / 4) % 4] = 0.0;
    const double got = ff::fuzzy::defuzzify_centroid(ff::fuzzy::AggregatedOutput(a, out));
    worst = std::max(worst, std::abs(got - ff::test::centroid_oracle(a.values, 1'000'000)));
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-3 && elapsed < 5.0,
          "200 vectors, max |error| " + fmt(worst, 6) + " (<= 1e-3), " + fmt(elapsed) + " s (< 5 s)"};
}

// --- 3 ---------------------------------------------------------------------

Outcome window_logic() {
  struct Row {
    RiskLevel prior;
    bool declared;
    std::optional<std::size_t> expected;  // nullopt = all
  };
  const Row table[] = {
      {RiskLevel::nfr, false, std::nullopt}, {RiskLevel::lfr, false, 15}, {RiskLevel::hfr, false, 10},
      {RiskLevel::efr, false, 5},           {RiskLevel::nfr, true, 5},   {RiskLevel::lfr, true, 5},
      {RiskLevel::hfr, true, 5},            {RiskLevel::efr, true, 5},
  };
  const auto& settings = ff::config::default_rule_base().controller;
  int ok = 0;
  for (const auto& r : table) ok += ff::risk::window_size(r.prior, r.declared, settings).count() == r.expected;
  return {ok == 8, std::to_string(ok) + "/8 (prior level x declaration) combinations"};
}

// --- 4 ---------------------------------------------------------------------

Outcome fire_detection() {
  const auto t0 = Clock::now();
  const auto scenario = ff::sim::Scenario::load(source_path("scenarios/fire-ramp.json"));

  // The bundled file must be the stated scenario.
  const auto& env = scenario.environment;
  const ff::risk::VariableValues baseline{25, 50, 10, 40, 300, 0.5, 21};
  bool shape = env.baseline == baseline && env.ramps.size() == 1 && scenario.cycle_period_s == 300;
  if (shape) {
    const auto& ramp = env.ramps[0];
    const std::map<ff::risk::Variable, double> target{{ff::risk::Variable::temperature, 45},
                                                      {ff::risk::Variable::co2, 2000},
                                                      {ff::risk::Variable::co, 10},
                                                      {ff::risk::Variable::o2, 18}};
    shape = ramp.start_s == 30 * 300 - 300 && ramp.duration_s == 10 * 300 && ramp.target == target;
  }
  if (!shape) return {false, "fire-ramp.json does not describe the baseline + 10-cycle ramp scenario"};

  ff::sim::Simulator sim(scenario, ff::config::default_rule_base_ptr());
  const auto result = sim.run();
  const auto onset = scenario.start + std::chrono::seconds(scenario.environment.ramps[0].start_s);
  std::optional<std::int64_t> cycles_after;
  for (const auto& a : sim.service().alerts()) {
    if (a.level == RiskLevel::efr) {
      const auto dt = (a.created - onset).count();
      cycles_after = (dt + scenario.cycle_period_s - 1) / scenario.cycle_period_s;
      break;
    }
  }
  const bool deterministic = simulate(scenario).trace_text() == result.trace_text();
  const double elapsed = seconds_since(t0);
  const bool pass = cycles_after && *cycles_after <= 6 && deterministic && elapsed < 10.0;
  return {pass, (cycles_after ? "EFR alert " + std::to_string(*cycles_after) + " cycles after ramp onset (<= 6)"
                              : std::string("no EFR alert")) +
                    ", rerun trace " + (deterministic ? "identical" : "DIFFERS") + ", " + fmt(elapsed) +
                    " s (< 10 s)"};
}

// --- 5 ---------------------------------------------------------------------

Outcome no_false_alarm() {
  auto scenario = ff::sim::Scenario::load(source_path("scenarios/baseline.json"));
  const auto cycles = scenario.duration_s / scenario.cycle_period_s;
  const bool shape = cycles == 100 && scenario.environment.noise == 0.02 && scenario.environment.ramps.empty();
  if (!shape) return {false, "baseline.json is not 100 cycles of baseline with 2 % noise"};
  // The bundled seed plus 19 more.
  std::size_t runs = 0, assessments = 0, raised = 0;
  for (std::uint64_t extra = 0; extra < 20; ++extra) {
    ff::sim::Simulator sim(scenario, ff::config::default_rule_base_ptr(),
                           {extra == 0 ? std::nullopt : std::optional<std::uint64_t>(extra), nullptr});
    const auto r = sim.run();
    ++runs;
    for (const auto& e : r.events) {
      if (e.kind != ff::sim::TraceKind::assessment) continue;
      ++assessments;
      raised += e.detail.at("level") != "NFR";
    }
    raised += sim.service().alerts().size();
  }
  return {raised == 0 && assessments == runs * 100,
          std::to_string(runs) + " seeds x 100 cycles: " + std::to_string(assessments) + " assessments, " +
              std::to_string(raised) + " above NFR or alerts"};
}

// --- 6 ---------------------------------------------------------------------

Outcome multihop_exactly_once() {
  const auto t0 = Clock::now();
  std::size_t packages = 0, wrong = 0, flooding_with_dups = 0, bad_topology = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto scenario = ff::sim::random_topology(seed);
    ff::sim::Simulator sim(scenario, ff::config::default_rule_base_ptr());
    // Shape: at most 20 nodes and a covered node reachable from every node.
    std::vector<std::size_t> covered;
    for (std::size_t i = 0; i < scenario.nodes.size(); ++i) {
      if (scenario.nodes[i].default_uplink && scenario.nodes[i].coverage.empty()) covered.push_back(i);
    }
    for (std::size_t i = 0; i < scenario.nodes.size(); ++i) {
      const auto hops = sim.graph().hops_from(i);
      bad_topology += std::none_of(covered.begin(), covered.end(), [&](std::size_t c) { return hops[c] != SIZE_MAX; });
    }
    bad_topology += scenario.nodes.size() > 20;

    const auto r = sim.run();
    for (const auto& p : r.packages) {
      ++packages;
      wrong += p.accepted != 1;
    }
    flooding_with_dups += r.counters.forward_events > 0 && r.counters.duplicate_drops > 0;
  }
  const double elapsed = seconds_since(t0);
  return {wrong == 0 && bad_topology == 0 && flooding_with_dups > 0 && elapsed < 30.0,
          "100 topologies, " + std::to_string(packages) + " packages, " + std::to_string(wrong) +
              " not accepted exactly once, " + std::to_string(flooding_with_dups) +
              " flooding topologies with duplicate drops, " + fmt(elapsed) + " s (< 30 s)"};
}

// --- 7 ---------------------------------------------------------------------

Outcome crypto_checks() {
  using namespace ff::crypto;
  const auto key = array_from_hex<32>(ff::test::kNistKey);
  const auto iv = array_from_hex<16>(ff::test::kNistIv);
  const Bytes plain = from_hex(ff::test::kNistPlain);
  const bool kat = to_hex(aes256_cbc_encrypt_blocks(key, iv, plain)) == ff::test::kNistCipher &&
                   aes256_cbc_decrypt_blocks(key, iv, from_hex(ff::test::kNistCipher)) == plain;

  DeterministicRandom rng(sha256(as_bytes("acceptance-lamport")), 0);
  int roundtrips = 0, mutations_rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    auto kp = LamportKeyPair::generate(rng);
    Bytes msg(1 + i % 97);
    rng.fill(msg);
    const auto pub = kp.public_key();
    const auto sig = kp.sign(msg);
    roundtrips += lamport_verify(pub, msg, sig);
    if (i < 100) {
      auto mutated = msg;
      mutated[static_cast<std::size_t>(i) % mutated.size()] ^= static_cast<std::uint8_t>(1u << (i % 8));
      mutations_rejected += !lamport_verify(pub, mutated, sig);
    }
  }

  NodeKeyState pool("356938035643809", sha256(as_bytes("acceptance-pool")), 1024);
  const auto& tree = pool.tree();
  int proofs = 0, corrupt_rejected = 0, corrupt_total = 0;
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
    auto path = tree.prove(i);
    proofs += merkle_verify(tree.root(), tree.leaf(i), i, path);
    // One corrupted element per leaf, rotating through the levels.
    const auto level = i % path.size();
    path[level][i % kDigestSize] ^= 0x01;
    ++corrupt_total;
    corrupt_rejected += !merkle_verify(tree.root(), tree.leaf(i), i, path);
  }
  const bool pass = kat && roundtrips == 1000 && mutations_rejected == 100 && proofs == 1024 &&
                    corrupt_rejected == corrupt_total;
  return {pass, std::string("AES-256-CBC KAT ") + (kat ? "exact" : "MISMATCH") + ", Lamport " +
                    std::to_string(roundtrips) + "/1000 roundtrips, " + std::to_string(mutations_rejected) +
                    "/100 mutations rejected, Merkle " + std::to_string(proofs) + "/1024 proofs, " +
                    std::to_string(corrupt_rejected) + "/" + std::to_string(corrupt_total) +
                    " corrupted paths rejected"};
}

// --- processes for 8 and 9 -------------------------------------------------

class Process {
 public:
  Process(const std::vector<std::string>& argv, const std::vector<std::string>& extra_env, const fs::path& output) {
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    std::vector<std::string> env_store(extra_env);
    for (char** e = environ; *e; ++e) env_store.emplace_back(*e);
    std::vector<char*> envp;
    for (auto& e : env_store) envp.push_back(e.data());
    envp.push_back(nullptr);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, output.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
    const int rc = posix_spawn(&pid_, args[0], &actions, nullptr, args.data(), envp.data());
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) throw std::runtime_error("cannot start " + argv[0] + ": " + std::strerror(rc));
  }
  ~Process() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      wait();
    }
  }
  Process(const Process&) = delete;
  Process& operator=(const Process&) = delete;

  void signal(int sig) const { ::kill(pid_, sig); }
  // Exit status, or 128 + signal.
  int wait() {
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  }

 private:
  pid_t pid_ = -1;
};

constexpr const char* kPassword = "acceptance-operator";

struct Workspace {
  fs::path dir;
  fs::path cli;
  fs::path output;

  Workspace(fs::path cli_path, std::string_view tag) : cli(std::move(cli_path)) {
    dir = fs::temp_directory_path() / ("ff-accept-" + std::string(tag) + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    output = dir / "processes.out";
  }
  ~Workspace() {
    if (!std::getenv("FORESTFIRE_KEEP_ACCEPTANCE")) fs::remove_all(dir);
  }

  int run(std::vector<std::string> args, std::vector<std::string> env = {}) {
    args.insert(args.begin(), cli.string());
    Process p(args, env, output);
    return p.wait();
  }

  std::unique_ptr<Process> serve(const fs::path& log, const fs::path& registry, int& port) {
    const auto ready = dir / "ready";
    fs::remove(ready);
    auto p = std::make_unique<Process>(
        std::vector<std::string>{cli.string(), "serve", "--port", "0", "--log", log.string(), "--registry",
                                 registry.string(), "--clock", "data", "--ready-file", ready.string()},
        std::vector<std::string>{std::string("FORESTFIRE_OPERATOR_PASSWORD=") + kPassword}, output);
    const auto deadline = Clock::now() + 10s;
    while (!fs::exists(ready)) {
      if (Clock::now() > deadline) throw std::runtime_error("service did not become ready");
      std::this_thread::sleep_for(10ms);
    }
    std::ifstream(ready) >> port;
    return p;
  }

  std::vector<std::string> replay_args(const fs::path& trace, int port) const {
    return {"replay", "--trace", trace.string(), "--service", "http://127.0.0.1:" + std::to_string(port),
            "--username", "operator"};
  }
  static std::vector<std::string> password_env() { return {std::string("FORESTFIRE_PASSWORD=") + kPassword}; }
};

std::size_t count_kind(const ff::ingest::LogRecovery& log, ff::ingest::EntryKind kind) {
  return static_cast<std::size_t>(
      std::count_if(log.entries.begin(), log.entries.end(), [&](const auto& e) { return e.kind == kind; }));
}

std::vector<json> payloads(const ff::ingest::LogRecovery& log, ff::ingest::EntryKind kind) {
  std::vector<json> out;
  for (const auto& e : log.entries) {
    if (e.kind == kind) out.push_back(e.payload);
  }
  return out;
}

// --- 8 ---------------------------------------------------------------------

Outcome tamper_rejection(const fs::path& cli) {
  Workspace ws(cli, "tamper");
  const auto trace = ws.dir / "fire.trace";
  const auto registry = ws.dir / "registry.json";
  if (ws.run({"simulate", "--scenario", source_path("scenarios/fire-ramp.json").string(), "--out", trace.string(),
              "--registry-out", registry.string()}) != 0) {
    return {false, "simulate failed"};
  }

  // Flip one ciphertext byte in the middle envelope of the trace.
  std::vector<std::string> lines;
  {
    std::ifstream in(trace);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
  }
  std::vector<std::size_t> measured;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (json::parse(lines[i]).at("event") == "measured") measured.push_back(i);
  }
  const std::size_t n = measured.size();
  auto victim = json::parse(lines[measured[n / 2]]);
  auto bytes = ff::crypto::from_base64(victim.at("envelope").get<std::string>());
  bytes[bytes.size() - 1] ^= 0x5a;
  victim["envelope"] = ff::crypto::to_base64(bytes);
  lines[measured[n / 2]] = victim.dump();
  const auto tampered = ws.dir / "tampered.trace";
  {
    std::ofstream out(tampered);
    for (const auto& l : lines) out << l << '\n';
  }

  const auto log = ws.dir / "service.log";
  int port = 0;
  auto server = ws.serve(log, registry, port);
  auto args = ws.replay_args(tampered, port);
  args.push_back("--fast");
  const int replay_rc = ws.run(args, Workspace::password_env());
  server->signal(SIGTERM);
  const int serve_rc = server->wait();

  const auto entries = ff::ingest::EventLog::read(log);
  const auto stored = count_kind(entries, ff::ingest::EntryKind::measurement);
  const auto rejections = payloads(entries, ff::ingest::EntryKind::rejection);
  const bool right_package =
      rejections.size() == 1 && rejections[0].value("package_id", "") == victim.at("package").get<std::string>();
  const bool pass = replay_rc == 0 && serve_rc == 0 && stored == n - 1 && rejections.size() == 1 && right_package;
  return {pass, "N=" + std::to_string(n) + ": " + std::to_string(stored) + " measurements persisted, " +
                    std::to_string(rejections.size()) + " rejection entries" +
                    (right_package ? " (the tampered package)" : "") + ", replay exit " + std::to_string(replay_rc)};
}

// --- 9 ---------------------------------------------------------------------

Outcome crash_recovery(const fs::path& cli) {
  Workspace ws(cli, "crash");
  const auto trace = ws.dir / "fire.trace";
  const auto registry = ws.dir / "registry.json";
  if (ws.run({"simulate", "--scenario", source_path("scenarios/fire-ramp.json").string(), "--out", trace.string(),
              "--registry-out", registry.string()}) != 0) {
    return {false, "simulate failed"};
  }
  const auto total = ff::sim::read_trace_envelopes(trace).size();

  // Uninterrupted reference run.
  const auto reference_log = ws.dir / "reference.log";
  {
    int port = 0;
    auto server = ws.serve(reference_log, registry, port);
    auto args = ws.replay_args(trace, port);
    args.push_back("--fast");
    if (ws.run(args, Workspace::password_env()) != 0) return {false, "reference replay failed"};
    server->signal(SIGTERM);
    server->wait();
  }

  // Timed replay (about 3 s of wall time), SIGKILL after 1.5 s.
  const auto crash_log = ws.dir / "crash.log";
  std::size_t before_kill = 0;
  {
    int port = 0;
    auto server = ws.serve(crash_log, registry, port);
    auto args = ws.replay_args(trace, port);
    args.insert(args.end(), {"--speed", "4400"});
    Process replay([&] {
      std::vector<std::string> a{ws.cli.string()};
      a.insert(a.end(), args.begin(), args.end());
      return a;
    }(), Workspace::password_env(), ws.output);
    std::this_thread::sleep_for(1500ms);
    server->signal(SIGKILL);
    server->wait();
    replay.wait();
  }
  before_kill = count_kind(ff::ingest::EventLog::read(crash_log), ff::ingest::EntryKind::measurement);
  // A torn final write on top of the kill.
  {
    std::ofstream torn(crash_log, std::ios::app | std::ios::binary);
    torn << "0123456789abcdef {\"seq\":";
  }

  // Restart on the same log and replay everything; already-stored packages
  // come back as duplicates.
  {
    int port = 0;
    auto server = ws.serve(crash_log, registry, port);
    auto args = ws.replay_args(trace, port);
    args.push_back("--fast");
    if (ws.run(args, Workspace::password_env()) != 0) return {false, "replay after restart failed"};
    server->signal(SIGTERM);
    server->wait();
  }

  const auto reference = ff::ingest::EventLog::read(reference_log);
  const auto recovered = ff::ingest::EventLog::read(crash_log);
  const auto ref_assess = payloads(reference, ff::ingest::EntryKind::assessment);
  const auto rec_assess = payloads(recovered, ff::ingest::EntryKind::assessment);
  const auto ref_alerts = payloads(reference, ff::ingest::EntryKind::alert);
  const auto rec_alerts = payloads(recovered, ff::ingest::EntryKind::alert);
  const bool mid = before_kill > 0 && before_kill < total;
  const bool same = ref_assess == rec_assess && ref_alerts == rec_alerts && ref_assess.size() == total;
  return {mid && same, "killed after " + std::to_string(before_kill) + "/" + std::to_string(total) +
                           " packages; " + std::to_string(rec_assess.size()) + " assessments and " +
                           std::to_string(rec_alerts.size()) + " alert records after restart " +
                           (same ? "identical to" : "DIFFER from") + " the uninterrupted run"};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path cli;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance --cli <forestfire binary> [--only N]...\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"FAM fidelity", fam_fidelity},
      {"Centroid accuracy", centroid_accuracy},
      {"Window logic", window_logic},
      {"Fire-detection scenario", fire_detection},
      {"No-false-alarm scenario", no_false_alarm},
      {"Multi-hop exactly-once", multihop_exactly_once},
      {"Crypto", crypto_checks},
      {"Tamper rejection", [&] { return tamper_rejection(cli); }},
      {"Crash recovery", [&] { return crash_recovery(cli); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && !only.contains(number)) continue;
    Outcome o;
    if (number >= 8 && cli.empty()) {
      o = {false, "needs --cli"};
    } else {
      try {
        o = criteria[i].second();
      } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
      }
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << number << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
