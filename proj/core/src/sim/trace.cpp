#include "forestfire/sim/trace.hpp"

#include <array>
#include <fstream>

#include "forestfire/error.hpp"

namespace forestfire::sim {

namespace {
constexpr std::array<std::string_view, 12> kKinds{
    "measured", "sent-uplink", "delivered",  "forwarded",   "dropped-duplicate", "dropped-ttl",
    "buffered", "rejected",    "assessment", "alert",       "declaration",       "frequency"};
}

std::string_view to_string(TraceKind k) { return kKinds[static_cast<std::size_t>(k)]; }

std::optional<TraceKind> parse_trace_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKinds.size(); ++i) {
    if (kKinds[i] == text) return static_cast<TraceKind>(i);
  }
  return std::nullopt;
}

std::string format_trace_line(const TraceEvent& e, risk::Timestamp start) {
  nlohmann::ordered_json j;
  j["t_ms"] = e.t_ms;
  j["time"] = risk::format_timestamp(start + std::chrono::seconds(e.t_ms / 1000));
  j["event"] = to_string(e.kind);
  j["node"] = e.node;
  if (!e.package.empty()) j["package"] = e.package;
  for (const auto& [key, value] : e.detail.items()) j[key] = value;
  return j.dump();
}

std::vector<TracedEnvelope> read_trace_envelopes(std::istream& in) {
  std::vector<TracedEnvelope> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error("trace line " + std::to_string(number) + " is not JSON");
    if (j.value("event", "") != "measured") continue;
    try {
      out.push_back({j.at("t_ms").get<std::int64_t>(), j.at("node").get<std::string>(),
                     j.at("package").get<std::string>(), crypto::from_base64(j.at("envelope").get<std::string>())});
    } catch (const std::exception& e) {
      throw Error("trace line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<TracedEnvelope> read_trace_envelopes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read trace " + path.string());
  return read_trace_envelopes(in);
}

}  // namespace forestfire::sim
