#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include "forestfire/ingest/event_log.hpp"

namespace forestfire::ingest {

// Column order of the per-cycle CSV.
std::string report_header();

// One row per logged assessment of `area_id`, in log order. A log with no
// assessments at all yields only the header; otherwise an area without
// assessments throws NotFound.
void write_area_report(const LogRecovery& log, std::string_view area_id, std::ostream& out);

}  // namespace forestfire::ingest
