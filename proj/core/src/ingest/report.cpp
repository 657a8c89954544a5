#include "forestfire/ingest/report.hpp"

#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "forestfire/error.hpp"
#include "forestfire/risk/measurement.hpp"

namespace forestfire::ingest {

namespace {

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

std::string report_header() {
  std::string h = "timestamp,device_id";
  for (auto v : risk::kVariables) h += "," + std::string(risk::to_string(v));
  for (auto v : risk::kVariables) h += ",avg_" + std::string(risk::to_string(v));
  return h + ",window,samples_averaged,percentage,level";
}

void write_area_report(const LogRecovery& log, std::string_view area_id, std::ostream& out) {
  std::vector<std::string> rows;
  bool any = false;
  for (const auto& e : log.entries) {
    if (e.kind != EntryKind::assessment) continue;
    any = true;
    const auto& p = e.payload;
    if (p.at("area_id").get<std::string_view>() != area_id) continue;
    std::string row = p.at("timestamp").get<std::string>() + "," + p.at("device_id").get<std::string>();
    for (auto v : risk::kVariables) row += "," + number(p.at("last").at(std::string(risk::to_string(v))));
    for (auto v : risk::kVariables) row += "," + number(p.at("averages").at(std::string(risk::to_string(v))));
    row += "," + p.at("window").get<std::string>() + "," + std::to_string(p.at("samples_averaged").get<int>()) + "," +
           number(p.at("percentage")) + "," + p.at("level").get<std::string>();
    rows.push_back(std::move(row));
  }
  if (any && rows.empty()) throw NotFound("no assessments for area '" + std::string(area_id) + "' in the log");
  out << report_header() << '\n';
  for (const auto& r : rows) out << r << '\n';
}

}  // namespace forestfire::ingest
