#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace forestfire::ingest {

enum class EntryKind : std::uint8_t { measurement, assessment, alert, declaration, frequency_change, rejection };

std::string_view to_string(EntryKind k);
std::optional<EntryKind> parse_entry_kind(std::string_view text);

struct LogEntry {
  std::uint64_t seq = 0;
  std::uint64_t txn = 0;
  EntryKind kind = EntryKind::measurement;
  std::string at;  // service clock, ISO-8601
  nlohmann::json payload;
};

struct PendingEntry {
  EntryKind kind;
  nlohmann::json payload;
};

// What open() found on disk.
struct LogRecovery {
  std::vector<LogEntry> entries;  // committed entries only, in order
  std::uint64_t dropped_bytes = 0;
  std::size_t dropped_lines = 0;
};

// Append-only JSON-lines log. Each line is
//   <16 hex digits> <json>\n
// where the hex digits are the first 8 bytes of SHA-256(json). Entries
// written by one append() share a txn id and the last carries "end": true;
// a transaction without its end line is discarded on open.
class EventLog {
 public:
  // Opens or creates the file, validates it and truncates a corrupted or
  // incomplete tail. Throws Error if the file cannot be opened.
  static std::unique_ptr<EventLog> open(const std::filesystem::path& path, bool sync = true);
  static std::unique_ptr<EventLog> in_memory();

  // Read-only parse; never modifies the file.
  static LogRecovery read(const std::filesystem::path& path);

  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  const LogRecovery& recovery() const { return recovery_; }
  std::uint64_t last_seq() const { return last_seq_; }
  bool persistent() const { return fd_ >= 0; }

  // Writes one transaction with a single write(2) and fsyncs when enabled.
  // Not thread-safe; the caller serializes appends.
  std::vector<LogEntry> append(std::vector<PendingEntry> entries, std::string_view at);

  // Drops the recovered entries once the caller has replayed them.
  void release_recovery() { recovery_.entries = {}; recovery_.entries.shrink_to_fit(); }

 private:
  EventLog() = default;

  int fd_ = -1;
  bool sync_ = false;
  std::uint64_t last_seq_ = 0;
  std::uint64_t last_txn_ = 0;
  std::uint64_t size_ = 0;  // bytes of committed transactions
  LogRecovery recovery_;
};

}  // namespace forestfire::ingest
