#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "forestfire/config/rule_base.hpp"
#include "forestfire/crypto/bytes.hpp"
#include "forestfire/crypto/registry.hpp"
#include "forestfire/ingest/event_bus.hpp"
#include "forestfire/ingest/event_log.hpp"
#include "forestfire/ingest/records.hpp"
#include "forestfire/risk/controller.hpp"

namespace forestfire::ingest {

enum class IngestStatus : std::uint8_t { accepted, duplicate, rejected };

enum class RejectReason : std::uint8_t {
  malformed_envelope,
  unknown_device,
  bad_signature,
  invalid_measurement,
  stale_measurement,
};

std::string_view to_string(IngestStatus s);
std::string_view to_string(RejectReason r);

struct IngestResult {
  IngestStatus status = IngestStatus::rejected;
  std::optional<RejectReason> reason;
  std::string message;
  std::string device_id;   // empty when the header was unreadable
  std::string package_id;  // hex
  std::optional<risk::RiskAssessment> assessment;
  std::vector<AlertRecord> alert_changes;
  // Pending cycle period handed to the origin device with this response.
  std::optional<std::chrono::seconds> frequency;

  // 200 accepted/duplicate; 400 malformed; 401 bad signature; 404 unknown device; 409 stale.
  int http_status() const;
};

enum class ClockMode : std::uint8_t {
  wall,  // system clock
  data,  // latest accepted measurement timestamp (wall clock before the first one)
};

struct FrequencyCommand {
  std::chrono::seconds period{};
  bool acknowledged = false;
  risk::Timestamp requested{};

  friend bool operator==(const FrequencyCommand&, const FrequencyCommand&) = default;
};

inline constexpr std::chrono::seconds kMinCyclePeriod{30};
inline constexpr std::chrono::seconds kMaxCyclePeriod{3600};

struct AreaSnapshot {
  risk::AreaState state;
  std::optional<AlertRecord> active_alert;
  std::vector<std::string> devices;
  std::size_t measurement_count = 0;
};

struct IngestStats {
  std::uint64_t accepted = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t rejected = 0;

  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

struct IngestOptions {
  ClockMode clock = ClockMode::wall;
  std::size_t event_retention = 10000;
  std::function<risk::Timestamp()> wall_clock;  // defaults to the system clock
};

// The service pipeline without the HTTP layer: decrypt, verify, replay
// check, assess, persist, alert. Thread-safe; signature checks run outside
// the state lock and every state change is serialized through it together
// with its log append, so the log order is the state order.
class IngestCore {
 public:
  // Rebuilds state from whatever the log recovered.
  IngestCore(std::shared_ptr<const config::RuleBase> rules, crypto::KeyRegistry registry,
             std::unique_ptr<EventLog> log, IngestOptions options = {});

  IngestResult ingest(crypto::ByteView envelope);

  // Throws NotFound for an unknown area and std::invalid_argument for NFR or
  // a non-positive ttl. `at` defaults to now().
  risk::Declaration declare(std::string_view area_id, risk::RiskLevel level, std::chrono::seconds ttl,
                            std::string_view actor, std::optional<risk::Timestamp> at = {});

  // Throws NotFound for an unknown device and std::invalid_argument for a
  // period outside [30 s, 3600 s].
  FrequencyCommand set_frequency(std::string_view device_id, std::chrono::seconds period, std::string_view actor,
                                 std::optional<risk::Timestamp> at = {});
  // Pull on device contact: returns a pending command once and marks it acknowledged.
  std::optional<std::chrono::seconds> take_frequency(std::string_view device_id);
  std::optional<FrequencyCommand> frequency(std::string_view device_id) const;

  void reload_registry(crypto::KeyRegistry registry);

  std::vector<std::string> areas() const;
  std::optional<AreaSnapshot> area(std::string_view area_id) const;
  // Accepted measurements of an area in arrival order, filtered to [from, to].
  std::vector<risk::Measurement> measurements(std::string_view area_id, std::optional<risk::Timestamp> from,
                                              std::optional<risk::Timestamp> to, std::size_t offset = 0,
                                              std::size_t limit = SIZE_MAX) const;
  std::vector<AlertRecord> alerts(std::optional<AlertState> state = {},
                                  std::optional<std::string_view> area_id = {}) const;
  IngestStats stats() const;
  bool has_device(std::string_view device_id) const;

  risk::Timestamp now() const;
  const risk::RiskController& controller() const { return controller_; }
  EventBus& events() { return bus_; }
  const EventBus& events() const { return bus_; }
  std::uint64_t last_seq() const;

 private:
  struct Transition {
    risk::RiskAssessment assessment;
    risk::AreaState area;
    std::vector<AlertRecord> alert_changes;
    std::optional<std::uint64_t> new_active;  // set when an alert is created
  };

  IngestResult reject(IngestResult r, RejectReason reason, std::string message);
  // State transition for a verified measurement, split so the log append
  // can sit between planning and committing. Caller holds the lock.
  Transition plan(const risk::Measurement& m, const std::string& package_id) const;
  void commit(const risk::Measurement& m, const std::string& package_id, const Transition& t);
  void recover(const LogRecovery& recovery);
  std::vector<LogEntry> append(std::vector<PendingEntry> entries, risk::Timestamp at);
  void publish(const std::vector<LogEntry>& entries);
  risk::Timestamp now_locked() const;
  void ensure_area(const std::string& area_id);

  risk::RiskController controller_;
  IngestOptions options_;
  std::unique_ptr<EventLog> log_;
  EventBus bus_;

  mutable std::shared_mutex mu_;
  crypto::KeyRegistry registry_;
  std::map<std::string, risk::AreaState, std::less<>> areas_;
  std::map<std::string, std::vector<risk::Measurement>, std::less<>> history_;
  std::map<std::string, risk::Timestamp, std::less<>> device_last_;
  std::set<std::string, std::less<>> ledger_;  // accepted package ids
  std::map<std::string, FrequencyCommand, std::less<>> frequencies_;
  std::vector<AlertRecord> alerts_;  // index = id - 1
  std::map<std::string, std::uint64_t, std::less<>> active_alert_;
  std::optional<risk::Timestamp> data_clock_;
  IngestStats stats_;
};

}  // namespace forestfire::ingest
