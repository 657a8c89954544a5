#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "forestfire/fuzzy/risk_level.hpp"

namespace forestfire::risk {

// Number of most recent samples averaged; `all` means the whole same-day history.
class Window {
 public:
  static constexpr Window all() { return Window(); }
  static constexpr Window latest(std::size_t count) { return Window(count); }

  bool is_all() const { return !count_.has_value(); }
  std::optional<std::size_t> count() const { return count_; }

  // Samples actually averaged when `available` are present.
  std::size_t effective(std::size_t available) const {
    return count_ && *count_ < available ? *count_ : available;
  }

  std::string to_string() const { return count_ ? std::to_string(*count_) : "all"; }

  // `all` compares as larger than any finite window.
  friend bool operator<(const Window& a, const Window& b) {
    if (a.is_all()) return false;
    if (b.is_all()) return true;
    return *a.count_ < *b.count_;
  }
  friend bool operator==(const Window&, const Window&) = default;

 private:
  constexpr Window() = default;
  constexpr explicit Window(std::size_t count) : count_(count) {}

  std::optional<std::size_t> count_;
};

struct ControllerSettings {
  // Averaging window per prior risk level, indexed by RiskLevel.
  std::array<Window, fuzzy::kRiskLevelCount> windows{Window::all(), Window::latest(15),
                                                     Window::latest(10), Window::latest(5)};
  // Upper bound on the window while an external declaration is active.
  std::size_t declaration_window = 5;
  // Recommended measurement cycle per current risk level.
  std::array<std::chrono::seconds, fuzzy::kRiskLevelCount> cycle_periods{
      std::chrono::seconds{300}, std::chrono::seconds{180}, std::chrono::seconds{120},
      std::chrono::seconds{60}};
  std::chrono::minutes default_utc_offset{0};
  std::map<std::string, std::chrono::minutes, std::less<>> area_utc_offsets;

  std::chrono::minutes utc_offset(std::string_view area) const {
    const auto it = area_utc_offsets.find(area);
    return it == area_utc_offsets.end() ? default_utc_offset : it->second;
  }
};

// "+01:00" / "-03:30" / "Z"; throws ConfigError otherwise.
std::chrono::minutes parse_utc_offset(std::string_view text);
std::string format_utc_offset(std::chrono::minutes offset);

}  // namespace forestfire::risk
