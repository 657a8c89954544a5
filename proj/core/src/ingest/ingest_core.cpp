#include "forestfire/ingest/ingest_core.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "forestfire/crypto/envelope.hpp"
#include "forestfire/error.hpp"

namespace forestfire::ingest {

namespace {

constexpr std::array<std::string_view, 3> kStatuses{"accepted", "duplicate", "rejected"};
constexpr std::array<std::string_view, 5> kReasons{"malformed_envelope", "unknown_device", "bad_signature",
                                                   "invalid_measurement", "stale_measurement"};

risk::Timestamp system_now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

nlohmann::json frequency_payload(std::string_view device, const FrequencyCommand& f, std::string_view actor) {
  nlohmann::json j{{"device_id", device},
                   {"period_seconds", f.period.count()},
                   {"state", f.acknowledged ? "acknowledged" : "pending"},
                   {"requested", risk::format_timestamp(f.requested)}};
  if (!actor.empty()) j["actor"] = actor;
  return j;
}

}  // namespace

std::string_view to_string(IngestStatus s) { return kStatuses[static_cast<std::size_t>(s)]; }
std::string_view to_string(RejectReason r) { return kReasons[static_cast<std::size_t>(r)]; }

int IngestResult::http_status() const {
  if (status != IngestStatus::rejected) return 200;
  switch (*reason) {
    case RejectReason::malformed_envelope:
    case RejectReason::invalid_measurement:
      return 400;
    case RejectReason::bad_signature:
      return 401;
    case RejectReason::unknown_device:
      return 404;
    case RejectReason::stale_measurement:
      return 409;
  }
  return 400;
}

IngestCore::IngestCore(std::shared_ptr<const config::RuleBase> rules, crypto::KeyRegistry registry,
                       std::unique_ptr<EventLog> log, IngestOptions options)
    : controller_(std::move(rules)),
      options_(std::move(options)),
      log_(log ? std::move(log) : EventLog::in_memory()),
      bus_(options_.event_retention),
      registry_(std::move(registry)) {
  if (!options_.wall_clock) options_.wall_clock = system_now;
  for (const auto* d : registry_.devices()) ensure_area(d->area_id);
  recover(log_->recovery());
  log_->release_recovery();
}

void IngestCore::ensure_area(const std::string& area_id) {
  auto [it, inserted] = areas_.try_emplace(area_id);
  if (inserted) it->second.area_id = area_id;
}

risk::Timestamp IngestCore::now_locked() const {
  if (options_.clock == ClockMode::data && data_clock_) return *data_clock_;
  return options_.wall_clock();
}

risk::Timestamp IngestCore::now() const {
  std::shared_lock lock(mu_);
  return now_locked();
}

std::uint64_t IngestCore::last_seq() const {
  std::shared_lock lock(mu_);
  return log_->last_seq();
}

std::vector<LogEntry> IngestCore::append(std::vector<PendingEntry> entries, risk::Timestamp at) {
  return log_->append(std::move(entries), risk::format_timestamp(at));
}

void IngestCore::publish(const std::vector<LogEntry>& entries) {
  std::vector<StreamEvent> events;
  for (const auto& e : entries) {
    switch (e.kind) {
      case EntryKind::assessment:
      case EntryKind::alert:
      case EntryKind::declaration:
      case EntryKind::frequency_change:
        events.push_back({e.seq, std::string(to_string(e.kind)), e.payload.dump()});
        break;
      case EntryKind::measurement:
      case EntryKind::rejection:
        break;
    }
  }
  bus_.publish(std::move(events));
}

IngestCore::Transition IngestCore::plan(const risk::Measurement& m, const std::string& package_id) const {
  const auto device_it = device_last_.find(m.device_id);
  if (device_it != device_last_.end() && m.timestamp <= device_it->second) {
    throw StaleMeasurement("timestamp " + risk::format_timestamp(m.timestamp) + " is not after " +
                           risk::format_timestamp(device_it->second) + " for device " + m.device_id);
  }
  risk::AreaState initial;
  initial.area_id = m.area_id;
  const auto area_it = areas_.find(m.area_id);
  auto [assessment, next] = controller_.assess(area_it == areas_.end() ? initial : area_it->second, m);

  Transition t{std::move(assessment), std::move(next), {}, std::nullopt};
  const auto& a = t.assessment;
  const auto active_it = active_alert_.find(m.area_id);
  const AlertRecord* active = active_it == active_alert_.end() ? nullptr : &alerts_[active_it->second - 1];
  if (a.level != risk::RiskLevel::nfr && (!active || active->level != a.level)) {
    AlertRecord created;
    created.id = alerts_.size() + 1;
    created.area_id = m.area_id;
    created.level = a.level;
    created.percentage = a.percentage;
    created.created = a.timestamp;
    created.package_id = package_id;
    if (active) {
      created.supersedes = active->id;
      AlertRecord old = *active;
      old.state = AlertState::superseded;
      old.superseded_by = created.id;
      old.closed = a.timestamp;
      t.alert_changes.push_back(std::move(old));
    }
    t.new_active = created.id;
    t.alert_changes.push_back(std::move(created));
  } else if (a.level == risk::RiskLevel::nfr && active) {
    AlertRecord old = *active;
    old.state = AlertState::cleared;
    old.closed = a.timestamp;
    t.alert_changes.push_back(std::move(old));
  }
  return t;
}

void IngestCore::commit(const risk::Measurement& m, const std::string& package_id, const Transition& t) {
  areas_[m.area_id] = t.area;
  history_[m.area_id].push_back(m);
  device_last_[m.device_id] = m.timestamp;
  ledger_.insert(package_id);
  data_clock_ = data_clock_ ? std::max(*data_clock_, m.timestamp) : m.timestamp;
  for (const auto& change : t.alert_changes) {
    if (change.id > alerts_.size()) {
      alerts_.push_back(change);
    } else {
      alerts_[change.id - 1] = change;
    }
  }
  if (t.new_active) {
    active_alert_[m.area_id] = *t.new_active;
  } else if (!t.alert_changes.empty()) {
    active_alert_.erase(m.area_id);
  }
  ++stats_.accepted;
}

IngestResult IngestCore::reject(IngestResult r, RejectReason reason, std::string message) {
  r.status = IngestStatus::rejected;
  r.reason = reason;
  r.message = std::move(message);
  nlohmann::json payload{{"reason", to_string(reason)}, {"message", r.message}};
  if (!r.device_id.empty()) payload["device_id"] = r.device_id;
  if (!r.package_id.empty()) payload["package_id"] = r.package_id;
  std::unique_lock lock(mu_);
  append({{EntryKind::rejection, std::move(payload)}}, now_locked());
  ++stats_.rejected;
  spdlog::info("rejected package {} from '{}': {}", r.package_id, r.device_id, r.message);
  return r;
}

IngestResult IngestCore::ingest(crypto::ByteView bytes) {
  IngestResult r;
  try {
    r.device_id = crypto::peek_device_id(bytes);
  } catch (const CryptoError& e) {
    return reject(std::move(r), RejectReason::malformed_envelope, e.what());
  }

  crypto::AesKey key{};
  crypto::Digest root{};
  std::size_t depth = 0;
  std::string area_id;
  {
    std::shared_lock lock(mu_);
    const crypto::DeviceRecord* record = registry_.find(r.device_id);
    if (record) {
      key = record->aes_key;
      root = record->merkle_root;
      depth = record->tree_depth();
      area_id = record->area_id;
    }
  }
  if (area_id.empty()) {
    return reject(std::move(r), RejectReason::unknown_device, "device " + r.device_id + " is not registered");
  }

  crypto::Envelope envelope;
  try {
    envelope = crypto::decode_envelope(bytes, depth);
  } catch (const CryptoError& e) {
    return reject(std::move(r), RejectReason::malformed_envelope, e.what());
  }
  r.package_id = crypto::to_hex(envelope.package_id);

  crypto::Bytes plaintext;
  try {
    plaintext = crypto::open_envelope(envelope, key);
  } catch (const CryptoError& e) {
    return reject(std::move(r), RejectReason::bad_signature, std::string("decryption failed: ") + e.what());
  }
  if (!crypto::verify_package(root, plaintext, envelope.signature)) {
    return reject(std::move(r), RejectReason::bad_signature, "signature does not verify against the registered root");
  }

  risk::Measurement m;
  try {
    m = risk::parse_measurement(std::string_view(reinterpret_cast<const char*>(plaintext.data()), plaintext.size()));
  } catch (const InvalidMeasurement& e) {
    return reject(std::move(r), RejectReason::invalid_measurement, e.what());
  }
  if (m.device_id != r.device_id) {
    return reject(std::move(r), RejectReason::invalid_measurement,
                  "measurement device " + m.device_id + " does not match envelope device");
  }
  if (m.area_id != area_id) {
    return reject(std::move(r), RejectReason::invalid_measurement,
                  "device " + r.device_id + " is registered to area '" + area_id + "', not '" + m.area_id + "'");
  }

  std::unique_lock lock(mu_);
  if (ledger_.contains(r.package_id)) {
    ++stats_.duplicates;
    r.status = IngestStatus::duplicate;
    r.message = "package already accepted";
    return r;
  }

  Transition t;
  try {
    t = plan(m, r.package_id);
  } catch (const StaleMeasurement& e) {
    lock.unlock();
    return reject(std::move(r), RejectReason::stale_measurement, e.what());
  } catch (const InvalidMeasurement& e) {
    lock.unlock();
    return reject(std::move(r), RejectReason::invalid_measurement, e.what());
  }

  std::vector<PendingEntry> entries;
  entries.push_back({EntryKind::measurement,
                     {{"package_id", r.package_id}, {"device_id", m.device_id}, {"measurement", m}}});
  nlohmann::json assessment = to_json(t.assessment);
  assessment["package_id"] = r.package_id;
  entries.push_back({EntryKind::assessment, std::move(assessment)});
  for (const auto& change : t.alert_changes) entries.push_back({EntryKind::alert, to_json(change)});
  auto freq = frequencies_.find(m.device_id);
  const bool hand_over = freq != frequencies_.end() && !freq->second.acknowledged;
  if (hand_over) {
    FrequencyCommand acked = freq->second;
    acked.acknowledged = true;
    entries.push_back({EntryKind::frequency_change, frequency_payload(m.device_id, acked, "")});
  }

  // A failed append throws before anything is committed.
  const risk::Timestamp at = options_.clock == ClockMode::data ? std::max(now_locked(), m.timestamp) : now_locked();
  const std::vector<LogEntry> written = append(std::move(entries), at);
  commit(m, r.package_id, t);
  if (hand_over) {
    freq->second.acknowledged = true;
    r.frequency = freq->second.period;
  }
  publish(written);

  r.status = IngestStatus::accepted;
  r.assessment = std::move(t.assessment);
  r.alert_changes = std::move(t.alert_changes);
  return r;
}

risk::Declaration IngestCore::declare(std::string_view area_id, risk::RiskLevel level, std::chrono::seconds ttl,
                                      std::string_view actor, std::optional<risk::Timestamp> at) {
  std::unique_lock lock(mu_);
  const auto it = areas_.find(area_id);
  if (it == areas_.end()) throw NotFound("unknown area '" + std::string(area_id) + "'");
  const risk::Timestamp when = at.value_or(now_locked());
  risk::AreaState next = controller_.apply_declaration(it->second, level, ttl, when);
  nlohmann::json payload = to_json(*next.declaration);
  payload["area_id"] = area_id;
  payload["ttl_seconds"] = ttl.count();
  payload["declared"] = risk::format_timestamp(when);
  payload["actor"] = actor;
  publish(append({{EntryKind::declaration, std::move(payload)}}, when));
  it->second = std::move(next);
  return *it->second.declaration;
}

FrequencyCommand IngestCore::set_frequency(std::string_view device_id, std::chrono::seconds period,
                                           std::string_view actor, std::optional<risk::Timestamp> at) {
  if (period < kMinCyclePeriod || period > kMaxCyclePeriod) {
    throw std::invalid_argument("cycle period must be within [30, 3600] seconds");
  }
  std::unique_lock lock(mu_);
  if (!registry_.find(device_id)) throw NotFound("unknown device '" + std::string(device_id) + "'");
  const FrequencyCommand cmd{period, false, at.value_or(now_locked())};
  publish(append({{EntryKind::frequency_change, frequency_payload(device_id, cmd, actor)}}, cmd.requested));
  frequencies_[std::string(device_id)] = cmd;
  return cmd;
}

std::optional<std::chrono::seconds> IngestCore::take_frequency(std::string_view device_id) {
  std::unique_lock lock(mu_);
  const auto it = frequencies_.find(device_id);
  if (it == frequencies_.end() || it->second.acknowledged) return std::nullopt;
  FrequencyCommand acked = it->second;
  acked.acknowledged = true;
  publish(append({{EntryKind::frequency_change, frequency_payload(device_id, acked, "")}}, now_locked()));
  it->second = acked;
  return acked.period;
}

std::optional<FrequencyCommand> IngestCore::frequency(std::string_view device_id) const {
  std::shared_lock lock(mu_);
  const auto it = frequencies_.find(device_id);
  if (it == frequencies_.end()) return std::nullopt;
  return it->second;
}

void IngestCore::reload_registry(crypto::KeyRegistry registry) {
  std::unique_lock lock(mu_);
  registry_ = std::move(registry);
  for (const auto* d : registry_.devices()) ensure_area(d->area_id);
}

bool IngestCore::has_device(std::string_view device_id) const {
  std::shared_lock lock(mu_);
  return registry_.find(device_id) != nullptr;
}

std::vector<std::string> IngestCore::areas() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : areas_) out.push_back(id);
  return out;
}

std::optional<AreaSnapshot> IngestCore::area(std::string_view area_id) const {
  std::shared_lock lock(mu_);
  const auto it = areas_.find(area_id);
  if (it == areas_.end()) return std::nullopt;
  AreaSnapshot s{it->second, std::nullopt, {}, 0};
  if (const auto a = active_alert_.find(area_id); a != active_alert_.end()) s.active_alert = alerts_[a->second - 1];
  for (const auto* d : registry_.devices()) {
    if (d->area_id == area_id) s.devices.push_back(d->device_id);
  }
  if (const auto h = history_.find(area_id); h != history_.end()) s.measurement_count = h->second.size();
  return s;
}

std::vector<risk::Measurement> IngestCore::measurements(std::string_view area_id, std::optional<risk::Timestamp> from,
                                                        std::optional<risk::Timestamp> to, std::size_t offset,
                                                        std::size_t limit) const {
  std::shared_lock lock(mu_);
  if (!areas_.contains(area_id)) throw NotFound("unknown area '" + std::string(area_id) + "'");
  std::vector<risk::Measurement> out;
  const auto h = history_.find(area_id);
  if (h == history_.end()) return out;
  std::size_t skipped = 0;
  for (const auto& m : h->second) {
    if ((from && m.timestamp < *from) || (to && m.timestamp > *to)) continue;
    if (skipped++ < offset) continue;
    if (out.size() >= limit) break;
    out.push_back(m);
  }
  return out;
}

std::vector<AlertRecord> IngestCore::alerts(std::optional<AlertState> state,
                                            std::optional<std::string_view> area_id) const {
  std::shared_lock lock(mu_);
  std::vector<AlertRecord> out;
  for (const auto& a : alerts_) {
    if (state && a.state != *state) continue;
    if (area_id && a.area_id != *area_id) continue;
    out.push_back(a);
  }
  return out;
}

IngestStats IngestCore::stats() const {
  std::shared_lock lock(mu_);
  return stats_;
}

void IngestCore::recover(const LogRecovery& recovery) {
  std::size_t mismatches = 0;
  std::optional<std::string> expected_assessment;
  for (const LogEntry& e : recovery.entries) {
    try {
      switch (e.kind) {
        case EntryKind::measurement: {
          const auto m = e.payload.at("measurement").get<risk::Measurement>();
          const auto package_id = e.payload.at("package_id").get<std::string>();
          const Transition t = plan(m, package_id);
          commit(m, package_id, t);
          nlohmann::json j = to_json(t.assessment);
          j["package_id"] = package_id;
          expected_assessment = j.dump();
          break;
        }
        case EntryKind::assessment:
          if (expected_assessment && *expected_assessment != e.payload.dump()) ++mismatches;
          expected_assessment.reset();
          break;
        case EntryKind::declaration: {
          const auto area = e.payload.at("area_id").get<std::string>();
          const auto level = fuzzy::parse_risk_level(e.payload.at("level").get<std::string>());
          if (!level) throw ConfigError("bad declaration level");
          ensure_area(area);
          areas_.at(area).declaration =
              risk::Declaration{*level, risk::parse_timestamp(e.payload.at("expiry").get<std::string>())};
          break;
        }
        case EntryKind::frequency_change:
          frequencies_[e.payload.at("device_id").get<std::string>()] = FrequencyCommand{
              std::chrono::seconds(e.payload.at("period_seconds").get<std::int64_t>()),
              e.payload.at("state").get<std::string>() == "acknowledged",
              risk::parse_timestamp(e.payload.at("requested").get<std::string>())};
          break;
        case EntryKind::rejection:
          ++stats_.rejected;
          break;
        case EntryKind::alert:
          break;  // rebuilt by plan/commit
      }
    } catch (const std::exception& ex) {
      spdlog::error("event log entry {} ({}) could not be replayed: {}", e.seq, to_string(e.kind), ex.what());
    }
  }
  if (mismatches > 0) {
    spdlog::warn("{} replayed assessments differ from the logged ones; the rule base may have changed", mismatches);
  }
  publish(recovery.entries);
  if (!recovery.entries.empty()) {
    spdlog::info("recovered {} log entries up to seq {}", recovery.entries.size(), recovery.entries.back().seq);
  }
}

}  // namespace forestfire::ingest
