#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "forestfire/crypto/bytes.hpp"
#include "forestfire/risk/measurement.hpp"

namespace forestfire::sim {

enum class TraceKind : std::uint8_t {
  measured,
  sent_uplink,
  delivered,
  forwarded,
  dropped_duplicate,
  dropped_ttl,
  buffered,
  rejected,
  assessment,
  alert,
  declaration,
  frequency,
};

std::string_view to_string(TraceKind k);
std::optional<TraceKind> parse_trace_kind(std::string_view text);

struct TraceEvent {
  std::int64_t t_ms = 0;  // since scenario start
  TraceKind kind = TraceKind::measured;
  std::string node;     // device id, "service" or "operator"
  std::string package;  // hex package id, empty when not package-related
  nlohmann::json detail = nlohmann::json::object();
};

// One JSON object per line: t_ms, time, event, node, package, then detail keys.
std::string format_trace_line(const TraceEvent& e, risk::Timestamp start);

// Originated envelopes recovered from a trace, in trace order.
struct TracedEnvelope {
  std::int64_t t_ms = 0;
  std::string node;
  std::string package;
  crypto::Bytes envelope;
};

// Throws Error on a malformed line.
std::vector<TracedEnvelope> read_trace_envelopes(std::istream& in);
std::vector<TracedEnvelope> read_trace_envelopes(const std::filesystem::path& path);

}  // namespace forestfire::sim
