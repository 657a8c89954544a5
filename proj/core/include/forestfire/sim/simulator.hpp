#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "forestfire/config/rule_base.hpp"
#include "forestfire/crypto/key_pool.hpp"
#include "forestfire/crypto/random.hpp"
#include "forestfire/crypto/registry.hpp"
#include "forestfire/ingest/ingest_core.hpp"
#include "forestfire/sim/environment.hpp"
#include "forestfire/sim/network.hpp"
#include "forestfire/sim/scenario.hpp"
#include "forestfire/sim/trace.hpp"

namespace forestfire::sim {

enum class Decision : std::uint8_t { deliver_uplink, forward, drop_duplicate, drop_ttl, buffer };

std::string_view to_string(Decision d);

// Routing rule applied by a node to a package: duplicate suppression first,
// then uplink, then buffering when isolated, then flooding while ttl lasts.
Decision decide(bool seen_before, bool has_uplink, bool has_neighbors, int ttl);

// Where each originated package ended up.
enum class Fate : std::uint8_t { delivered, buffered, dropped_ttl, rejected, suppressed };

std::string_view to_string(Fate f);

struct PackageOutcome {
  std::string package_id;
  std::string origin;
  std::int64_t originated_ms = 0;
  std::size_t accepted = 0;  // service acceptances, exactly once when delivered
  std::size_t uplink_sends = 0;
  std::size_t forwards = 0;
  bool ttl_dropped = false;
  bool rejected = false;
  bool buffered_at_end = false;
  Fate fate = Fate::suppressed;
};

struct SimCounters {
  std::size_t originated = 0;
  std::size_t delivered = 0;
  std::size_t buffered = 0;
  std::size_t dropped_ttl = 0;
  std::size_t rejected = 0;
  std::size_t suppressed = 0;
  std::size_t forward_events = 0;
  std::size_t duplicate_drops = 0;  // at nodes
  std::size_t service_duplicates = 0;
  std::size_t assessments = 0;
};

struct SimResult {
  std::vector<TraceEvent> events;
  std::vector<PackageOutcome> packages;
  SimCounters counters;
  risk::Timestamp start{};

  std::string trace_text() const;
};

struct SimOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  std::unique_ptr<ingest::EventLog> log;  // in-memory when null
};

// Deterministic single-threaded discrete-event run of a scenario against an
// in-process ingest service. Events are ordered by (time, insertion order).
class Simulator {
 public:
  Simulator(Scenario scenario, std::shared_ptr<const config::RuleBase> rules, SimOptions options = {});
  ~Simulator();

  SimResult run();

  const Scenario& scenario() const { return scenario_; }
  const crypto::KeyRegistry& registry() const { return registry_; }
  ingest::IngestCore& service() { return *service_; }
  const NeighborGraph& graph() const { return graph_; }
  std::uint64_t seed() const { return seed_; }

 private:
  struct Node;
  struct Packet;
  struct QueueItem;
  class Run;

  Scenario scenario_;
  std::uint64_t seed_;
  crypto::KeyRegistry registry_;
  NeighborGraph graph_;
  std::unique_ptr<ingest::IngestCore> service_;
  bool ran_ = false;
};

// Key material for a scenario's devices, derived from the seed.
crypto::KeyRegistry scenario_registry(const Scenario& scenario, std::uint64_t seed);

}  // namespace forestfire::sim
