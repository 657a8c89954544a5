#include "forestfire/sim/simulator.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <queue>
#include <set>

#include "forestfire/crypto/envelope.hpp"
#include "forestfire/crypto/sha256.hpp"
#include "forestfire/error.hpp"

namespace forestfire::sim {

namespace {

constexpr std::array<std::string_view, 5> kDecisions{"deliver-uplink", "forward", "drop-duplicate", "drop-ttl",
                                                     "buffer"};
constexpr std::array<std::string_view, 5> kFates{"delivered", "buffered", "dropped-ttl", "rejected", "suppressed"};

crypto::Digest derive(std::string_view label, std::uint64_t seed, std::string_view extra = {}) {
  std::array<std::uint8_t, 8> be{};
  for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  return crypto::sha256({crypto::as_bytes(label), be, crypto::as_bytes(extra)});
}

std::uint64_t seed_word(const crypto::Digest& d) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
  return v;
}

}  // namespace

std::string_view to_string(Decision d) { return kDecisions[static_cast<std::size_t>(d)]; }
std::string_view to_string(Fate f) { return kFates[static_cast<std::size_t>(f)]; }

Decision decide(bool seen_before, bool has_uplink, bool has_neighbors, int ttl) {
  if (seen_before) return Decision::drop_duplicate;
  if (has_uplink) return Decision::deliver_uplink;
  if (!has_neighbors) return Decision::buffer;
  if (ttl > 0) return Decision::forward;
  return Decision::drop_ttl;
}

std::string SimResult::trace_text() const {
  std::string out;
  for (const auto& e : events) {
    out += format_trace_line(e, start);
    out += '\n';
  }
  return out;
}

crypto::KeyRegistry scenario_registry(const Scenario& scenario, std::uint64_t seed) {
  std::vector<crypto::DeviceSpec> specs;
  for (const auto& n : scenario.nodes) specs.push_back({n.device_id, n.area_id});
  crypto::DeterministicRandom rng(derive("forestfire-sim-keys", seed), 0);
  return crypto::predistribute_keys(specs, rng, scenario.pool_size);
}

struct Simulator::Node {
  const NodeSpec* spec = nullptr;
  CoverageSchedule coverage;
  std::unique_ptr<crypto::NodeKeyState> keys;
  std::unique_ptr<crypto::DeterministicRandom> envelope_rng;
  std::mt19937_64 noise_rng;
  std::int64_t period_s = 0;
  std::set<std::size_t> seen;
  std::vector<std::pair<std::size_t, int>> buffer;  // (packet, ttl)
};

struct Simulator::Packet {
  std::string id;
  std::size_t origin = 0;
  crypto::Bytes envelope;
};

struct Simulator::QueueItem {
  enum class Type : std::uint8_t { action, cycle, arrival, uplink };
  std::int64_t t_ms = 0;
  std::uint64_t order = 0;
  Type type = Type::cycle;
  std::size_t node = 0;    // cycle / arrival target / uplink sender
  std::size_t index = 0;   // action index or packet index
  int ttl = 0;

  bool operator>(const QueueItem& o) const { return t_ms != o.t_ms ? t_ms > o.t_ms : order > o.order; }
};

class Simulator::Run {
 public:
  explicit Run(Simulator& sim) : sim_(sim), env_(sim.scenario_.environment) {
    result_.start = sim.scenario_.start;
    const auto& sc = sim.scenario_;
    for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
      Node n;
      n.spec = &sc.nodes[i];
      n.coverage = CoverageSchedule(sc.nodes[i].coverage, sc.nodes[i].default_uplink);
      n.keys = sim.registry_.node_keys(sc.nodes[i].device_id);
      n.envelope_rng = std::make_unique<crypto::DeterministicRandom>(
          derive("forestfire-sim-envelopes", sim.seed_, sc.nodes[i].device_id), 0);
      n.noise_rng.seed(seed_word(derive("forestfire-sim-noise", sim.seed_, sc.nodes[i].device_id)));
      n.period_s = sc.nodes[i].period_s.value_or(sc.cycle_period_s);
      nodes_.push_back(std::move(n));
    }
    for (std::size_t a = 0; a < sc.actions.size(); ++a) {
      push({sc.actions[a].at_s * 1000, 0, QueueItem::Type::action, 0, a, 0});
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (sc.nodes[i].offset_s < sc.duration_s) push({sc.nodes[i].offset_s * 1000, 0, QueueItem::Type::cycle, i, 0, 0});
    }
  }

  SimResult finish() {
    while (!queue_.empty()) {
      const QueueItem item = queue_.top();
      queue_.pop();
      switch (item.type) {
        case QueueItem::Type::action:
          on_action(item);
          break;
        case QueueItem::Type::cycle:
          on_cycle(item);
          break;
        case QueueItem::Type::arrival:
          handle(item.node, item.index, item.ttl, item.t_ms);
          break;
        case QueueItem::Type::uplink:
          on_uplink(item);
          break;
      }
    }
    for (const auto& n : nodes_) {
      for (const auto& [packet, _] : n.buffer) result_.packages[packet].buffered_at_end = true;
    }
    auto& c = result_.counters;
    for (auto& p : result_.packages) {
      if (p.accepted > 0) {
        p.fate = Fate::delivered;
        ++c.delivered;
      } else if (p.buffered_at_end) {
        p.fate = Fate::buffered;
        ++c.buffered;
      } else if (p.ttl_dropped) {
        p.fate = Fate::dropped_ttl;
        ++c.dropped_ttl;
      } else if (p.rejected) {
        p.fate = Fate::rejected;
        ++c.rejected;
      } else {
        p.fate = Fate::suppressed;
        ++c.suppressed;
      }
    }
    c.originated = result_.packages.size();
    return std::move(result_);
  }

 private:
  void push(QueueItem item) {
    item.order = next_order_++;
    queue_.push(item);
  }

  void trace(std::int64_t t_ms, TraceKind kind, std::string node, std::string package,
             nlohmann::json detail = nlohmann::json::object()) {
    result_.events.push_back({t_ms, kind, std::move(node), std::move(package), std::move(detail)});
  }

  risk::Timestamp at(std::int64_t t_ms) const {
    return sim_.scenario_.start + std::chrono::seconds(t_ms / 1000);
  }

  void on_action(const QueueItem& item) {
    const ScheduledAction& a = sim_.scenario_.actions[item.index];
    if (a.declare) {
      const auto d = sim_.service_->declare(a.declare->area_id, a.declare->level, std::chrono::seconds(a.declare->ttl_s),
                                            "scenario", at(item.t_ms));
      trace(item.t_ms, TraceKind::declaration, "operator", "",
            {{"area_id", a.declare->area_id}, {"level", fuzzy::to_string(d.level)},
             {"expiry", risk::format_timestamp(d.expiry)}});
    }
    if (a.frequency) {
      sim_.service_->set_frequency(a.frequency->device_id, std::chrono::seconds(a.frequency->period_s), "scenario",
                                   at(item.t_ms));
      trace(item.t_ms, TraceKind::frequency, "operator", "",
            {{"device_id", a.frequency->device_id}, {"period_seconds", a.frequency->period_s}, {"state", "pending"}});
    }
  }

  void on_cycle(const QueueItem& item) {
    Node& n = nodes_[item.node];
    const std::int64_t t_ms = item.t_ms;
    const bool uplink = n.coverage.covered_at_ms(t_ms);

    if (uplink) {
      // Pull any pending cycle period while in contact with the service.
      if (const auto period = sim_.service_->take_frequency(n.spec->device_id)) {
        n.period_s = period->count();
        trace(t_ms, TraceKind::frequency, n.spec->device_id, "",
              {{"period_seconds", n.period_s}, {"state", "applied"}});
      }
      auto pending = std::move(n.buffer);
      n.buffer.clear();
      for (const auto& [packet, ttl] : pending) route(item.node, packet, ttl, t_ms);
    }

    measure(item.node, t_ms);

    const std::int64_t next_ms = t_ms + n.period_s * 1000;
    if (next_ms < sim_.scenario_.duration_s * 1000) push({next_ms, 0, QueueItem::Type::cycle, item.node, 0, 0});
  }

  void measure(std::size_t node, std::int64_t t_ms) {
    Node& n = nodes_[node];
    risk::Measurement m;
    m.device_id = n.spec->device_id;
    m.area_id = n.spec->area_id;
    m.timestamp = at(t_ms);
    m.location = n.spec->location;
    m.battery = n.spec->battery;
    m.values = env_.sample(n.spec->area_id, t_ms / 1000, n.noise_rng);
    const std::string plaintext = risk::serialize(m);

    const auto aes = sim_.registry_.find(n.spec->device_id)->aes_key;
    const crypto::Envelope sealed = crypto::seal_envelope(*n.keys, aes, crypto::as_bytes(plaintext), *n.envelope_rng);
    Packet p{crypto::to_hex(sealed.package_id), node, crypto::encode_envelope(sealed)};
    const std::size_t index = packets_.size();
    trace(t_ms, TraceKind::measured, n.spec->device_id, p.id,
          {{"area_id", m.area_id}, {"key_index", sealed.signature.key_index}, {"ttl", sim_.scenario_.ttl},
           {"envelope", crypto::to_base64(p.envelope)}});
    result_.packages.push_back(PackageOutcome{p.id, n.spec->device_id, t_ms});
    packets_.push_back(std::move(p));
    handle(node, index, sim_.scenario_.ttl, t_ms);
  }

  void handle(std::size_t node, std::size_t packet, int ttl, std::int64_t t_ms) {
    Node& n = nodes_[node];
    if (!n.seen.insert(packet).second) {
      ++result_.counters.duplicate_drops;
      trace(t_ms, TraceKind::dropped_duplicate, n.spec->device_id, packets_[packet].id);
      return;
    }
    route(node, packet, ttl, t_ms);
  }

  void route(std::size_t node, std::size_t packet, int ttl, std::int64_t t_ms) {
    Node& n = nodes_[node];
    const auto& neighbors = sim_.graph_.neighbors(node);
    const auto& id = packets_[packet].id;
    auto& outcome = result_.packages[packet];
    switch (decide(false, n.coverage.covered_at_ms(t_ms), !neighbors.empty(), ttl)) {
      case Decision::deliver_uplink:
        ++outcome.uplink_sends;
        trace(t_ms, TraceKind::sent_uplink, n.spec->device_id, id);
        push({t_ms + sim_.scenario_.uplink_delay_ms, 0, QueueItem::Type::uplink, node, packet, ttl});
        break;
      case Decision::buffer:
        n.buffer.emplace_back(packet, ttl);
        trace(t_ms, TraceKind::buffered, n.spec->device_id, id);
        break;
      case Decision::forward: {
        ++outcome.forwards;
        ++result_.counters.forward_events;
        nlohmann::json to = nlohmann::json::array();
        for (std::size_t m : neighbors) {
          to.push_back(nodes_[m].spec->device_id);
          push({t_ms + sim_.scenario_.link_delay_ms, 0, QueueItem::Type::arrival, m, packet, ttl - 1});
        }
        trace(t_ms, TraceKind::forwarded, n.spec->device_id, id, {{"to", std::move(to)}, {"ttl", ttl - 1}});
        break;
      }
      case Decision::drop_ttl:
        outcome.ttl_dropped = true;
        trace(t_ms, TraceKind::dropped_ttl, n.spec->device_id, id);
        break;
      case Decision::drop_duplicate:
        break;
    }
  }

  void on_uplink(const QueueItem& item) {
    const Packet& p = packets_[item.index];
    auto& outcome = result_.packages[item.index];
    const ingest::IngestResult r = sim_.service_->ingest(p.envelope);
    const std::string& via = nodes_[item.node].spec->device_id;
    switch (r.status) {
      case ingest::IngestStatus::accepted: {
        ++outcome.accepted;
        trace(item.t_ms, TraceKind::delivered, "service", p.id, {{"via", via}, {"origin", r.device_id}});
        const auto& a = *r.assessment;
        ++result_.counters.assessments;
        trace(item.t_ms, TraceKind::assessment, "service", p.id,
              {{"area_id", a.area_id}, {"device_id", a.device_id}, {"timestamp", risk::format_timestamp(a.timestamp)},
               {"level", fuzzy::to_string(a.level)}, {"percentage", a.percentage}, {"window", a.window.to_string()},
               {"samples_averaged", a.samples_averaged}});
        for (const auto& alert : r.alert_changes) {
          trace(item.t_ms, TraceKind::alert, "service", p.id,
                {{"alert_id", alert.id}, {"area_id", alert.area_id}, {"level", fuzzy::to_string(alert.level)},
                 {"state", ingest::to_string(alert.state)}});
        }
        break;
      }
      case ingest::IngestStatus::duplicate:
        ++result_.counters.service_duplicates;
        trace(item.t_ms, TraceKind::dropped_duplicate, "service", p.id, {{"via", via}});
        break;
      case ingest::IngestStatus::rejected:
        outcome.rejected = true;
        trace(item.t_ms, TraceKind::rejected, "service", p.id,
              {{"via", via}, {"reason", ingest::to_string(*r.reason)}, {"message", r.message}});
        break;
    }
  }

  Simulator& sim_;
  EnvironmentModel env_;
  std::vector<Node> nodes_;
  std::vector<Packet> packets_;
  std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue_;
  std::uint64_t next_order_ = 0;
  SimResult result_;
};

Simulator::Simulator(Scenario scenario, std::shared_ptr<const config::RuleBase> rules, SimOptions options)
    : scenario_(std::move(scenario)), seed_(options.seed.value_or(scenario_.seed)) {
  registry_ = scenario_registry(scenario_, seed_);
  std::vector<risk::GeoPoint> positions;
  for (const auto& n : scenario_.nodes) positions.push_back(n.location);
  graph_ = NeighborGraph::build(positions, scenario_.radius_m);
  ingest::IngestOptions io;
  io.clock = ingest::ClockMode::data;
  const auto start = scenario_.start;
  io.wall_clock = [start] { return start; };
  service_ = std::make_unique<ingest::IngestCore>(std::move(rules), registry_, std::move(options.log), io);
}

Simulator::~Simulator() = default;

SimResult Simulator::run() {
  if (ran_) throw Error("a simulator instance runs once");
  ran_ = true;
  Run run(*this);
  return run.finish();
}

}  // namespace forestfire::sim
