#include "forestfire/fuzzy/fam.hpp"

#include "forestfire/error.hpp"

namespace forestfire::fuzzy {
namespace {

std::optional<std::size_t> find(const std::vector<std::string>& names, std::string_view name) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

}  // namespace

FamTable::FamTable(std::string variable, std::vector<std::string> rows, std::vector<std::string> columns,
                   std::vector<RiskLevel> cells)
    : variable_(std::move(variable)),
      rows_(std::move(rows)),
      columns_(std::move(columns)),
      cells_(std::move(cells)) {
  if (rows_.empty() || columns_.empty()) {
    throw ConfigError("FAM for '" + variable_ + "' needs at least one row and one column");
  }
  if (cells_.size() != rows_.size() * columns_.size()) {
    throw ConfigError("FAM for '" + variable_ + "' is not total: expected " +
                      std::to_string(rows_.size() * columns_.size()) + " cells, got " +
                      std::to_string(cells_.size()));
  }
}

RiskLevel FamTable::lookup(std::string_view row, std::string_view column) const {
  const auto r = find(rows_, row);
  const auto c = find(columns_, column);
  if (!r || !c) {
    throw ConfigError("FAM for '" + variable_ + "' has no cell (" + std::string(row) + ", " +
                      std::string(column) + ")");
  }
  return at(*r, *c);
}

bool FamTable::is_severity_monotone() const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c > 0 && at(r, c) < at(r, c - 1)) return false;
      if (r > 0 && at(r, c) < at(r - 1, c)) return false;
    }
  }
  return true;
}

}  // namespace forestfire::fuzzy
