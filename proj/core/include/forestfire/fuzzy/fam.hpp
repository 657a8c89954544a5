#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "forestfire/fuzzy/risk_level.hpp"

namespace forestfire::fuzzy {

// Fuzzy associative memory: (last-measurement term, average term) -> risk level.
class FamTable {
 public:
  // cells are row-major, rows.size() * columns.size() entries.
  FamTable(std::string variable, std::vector<std::string> rows, std::vector<std::string> columns,
           std::vector<RiskLevel> cells);

  const std::string& variable() const { return variable_; }
  const std::vector<std::string>& rows() const { return rows_; }
  const std::vector<std::string>& columns() const { return columns_; }

  RiskLevel at(std::size_t row, std::size_t column) const {
    return cells_[row * columns_.size() + column];
  }

  // Throws ConfigError for a term that is not a row/column of the table.
  RiskLevel lookup(std::string_view row, std::string_view column) const;

  // Severity never decreases along a row or down a column.
  bool is_severity_monotone() const;

 private:
  std::string variable_;
  std::vector<std::string> rows_;
  std::vector<std::string> columns_;
  std::vector<RiskLevel> cells_;
};

inline RiskLevel fam_lookup(const FamTable& table, std::string_view row, std::string_view column) {
  return table.lookup(row, column);
}

}  // namespace forestfire::fuzzy
