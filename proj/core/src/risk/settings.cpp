#include "forestfire/risk/settings.hpp"

#include <cstdio>
#include <cstdlib>

#include "forestfire/error.hpp"

namespace forestfire::risk {

std::chrono::minutes parse_utc_offset(std::string_view text) {
  if (text == "Z") return std::chrono::minutes{0};
  if (text.size() != 6 || (text[0] != '+' && text[0] != '-') || text[3] != ':') {
    throw ConfigError("utc offset '" + std::string(text) + "' is not +HH:MM");
  }
  auto digits = [&](std::size_t pos) {
    const char a = text[pos], b = text[pos + 1];
    if (a < '0' || a > '9' || b < '0' || b > '9') {
      throw ConfigError("utc offset '" + std::string(text) + "' is not +HH:MM");
    }
    return (a - '0') * 10 + (b - '0');
  };
  const int hours = digits(1);
  const int minutes = digits(4);
  if (hours > 14 || minutes > 59) throw ConfigError("utc offset '" + std::string(text) + "' out of range");
  const int total = hours * 60 + minutes;
  return std::chrono::minutes{text[0] == '-' ? -total : total};
}

std::string format_utc_offset(std::chrono::minutes offset) {
  const long total = offset.count();
  const long magnitude = std::labs(total);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%c%02ld:%02ld", total < 0 ? '-' : '+', magnitude / 60, magnitude % 60);
  return buf;
}

}  // namespace forestfire::risk
