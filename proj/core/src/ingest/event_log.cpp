#include "forestfire/ingest/event_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>

#include <spdlog/spdlog.h>

#include "forestfire/crypto/bytes.hpp"
#include "forestfire/crypto/sha256.hpp"
#include "forestfire/error.hpp"

namespace forestfire::ingest {

namespace {

constexpr std::array<std::string_view, 6> kKinds{"measurement",      "assessment", "alert", "declaration",
                                                 "frequency-change", "rejection"};
constexpr std::size_t kSumChars = 16;

std::string line_checksum(std::string_view json) {
  return crypto::to_hex(crypto::sha256(crypto::as_bytes(json))).substr(0, kSumChars);
}

std::optional<nlohmann::json> parse_line(std::string_view line) {
  if (line.size() < kSumChars + 2 || line[kSumChars] != ' ') return std::nullopt;
  const std::string_view json = line.substr(kSumChars + 1);
  if (line.substr(0, kSumChars) != line_checksum(json)) return std::nullopt;
  auto j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

std::optional<LogEntry> to_entry(const nlohmann::json& j) {
  try {
    const auto kind = parse_entry_kind(j.at("kind").get<std::string>());
    if (!kind) return std::nullopt;
    return LogEntry{j.at("seq").get<std::uint64_t>(), j.at("txn").get<std::uint64_t>(), *kind,
                    j.at("at").get<std::string>(), j.at("payload")};
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

struct Scan {
  LogRecovery recovery;
  std::uint64_t valid_bytes = 0;
};

Scan scan(const std::string& text) {
  Scan out;
  std::vector<LogEntry> txn_entries;
  std::uint64_t offset = 0;
  std::uint64_t last_seq = 0;
  while (offset < text.size()) {
    const auto nl = text.find('\n', offset);
    if (nl == std::string::npos) break;  // torn final line
    const auto j = parse_line(std::string_view(text).substr(offset, nl - offset));
    const auto entry = j ? to_entry(*j) : std::nullopt;
    if (!entry || entry->seq != last_seq + 1 ||
        (!txn_entries.empty() && entry->txn != txn_entries.front().txn)) {
      break;
    }
    last_seq = entry->seq;
    txn_entries.push_back(*entry);
    offset = nl + 1;
    if (j->value("end", false)) {
      for (auto& e : txn_entries) out.recovery.entries.push_back(std::move(e));
      txn_entries.clear();
      out.valid_bytes = offset;
    }
  }
  out.recovery.dropped_bytes = text.size() - out.valid_bytes;
  for (std::uint64_t i = out.valid_bytes; i < text.size(); ++i) {
    if (text[i] == '\n') ++out.recovery.dropped_lines;
  }
  if (out.recovery.dropped_bytes > 0 && text.back() != '\n') ++out.recovery.dropped_lines;
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read event log " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string_view to_string(EntryKind k) { return kKinds[static_cast<std::size_t>(k)]; }

std::optional<EntryKind> parse_entry_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKinds.size(); ++i) {
    if (kKinds[i] == text) return static_cast<EntryKind>(i);
  }
  return std::nullopt;
}

LogRecovery EventLog::read(const std::filesystem::path& path) { return scan(slurp(path)).recovery; }

std::unique_ptr<EventLog> EventLog::in_memory() { return std::unique_ptr<EventLog>(new EventLog()); }

std::unique_ptr<EventLog> EventLog::open(const std::filesystem::path& path, bool sync) {
  const int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0640);
  if (fd < 0) throw Error("cannot open event log " + path.string() + ": " + std::strerror(errno));
  std::unique_ptr<EventLog> log(new EventLog());
  log->fd_ = fd;
  log->sync_ = sync;

  Scan s = scan(slurp(path));
  if (s.recovery.dropped_bytes > 0) {
    spdlog::warn("event log {}: discarding {} bytes ({} lines) of corrupted or incomplete tail", path.string(),
                 s.recovery.dropped_bytes, s.recovery.dropped_lines);
    if (::ftruncate(fd, static_cast<off_t>(s.valid_bytes)) != 0) {
      throw Error("cannot truncate event log " + path.string() + ": " + std::strerror(errno));
    }
    ::fsync(fd);
  }
  if (::lseek(fd, 0, SEEK_END) < 0) throw Error("cannot seek event log " + path.string());
  log->size_ = s.valid_bytes;
  if (!s.recovery.entries.empty()) {
    log->last_seq_ = s.recovery.entries.back().seq;
    log->last_txn_ = s.recovery.entries.back().txn;
  }
  log->recovery_ = std::move(s.recovery);
  return log;
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

std::vector<LogEntry> EventLog::append(std::vector<PendingEntry> entries, std::string_view at) {
  std::vector<LogEntry> written;
  if (entries.empty()) return written;
  const std::uint64_t txn = last_txn_ + 1;
  std::string buffer;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    LogEntry e{last_seq_ + 1 + i, txn, entries[i].kind, std::string(at), std::move(entries[i].payload)};
    if (fd_ >= 0) {
      nlohmann::json j{{"seq", e.seq}, {"txn", e.txn}, {"kind", to_string(e.kind)}, {"at", e.at},
                       {"payload", e.payload}};
      if (i + 1 == entries.size()) j["end"] = true;
      const std::string json = j.dump();
      buffer += line_checksum(json);
      buffer += ' ';
      buffer += json;
      buffer += '\n';
    }
    written.push_back(std::move(e));
  }
  if (fd_ >= 0) {
    std::size_t done = 0;
    while (done < buffer.size()) {
      const ssize_t n = ::write(fd_, buffer.data() + done, buffer.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        const std::string reason = std::strerror(errno);
        // Leave no partial transaction behind for the next append to follow.
        if (::ftruncate(fd_, static_cast<off_t>(size_)) == 0) ::lseek(fd_, 0, SEEK_END);
        throw Error("event log write failed: " + reason);
      }
      done += static_cast<std::size_t>(n);
    }
    if (sync_ && ::fdatasync(fd_) != 0) throw Error(std::string("event log sync failed: ") + std::strerror(errno));
    size_ += buffer.size();
  }
  last_seq_ += written.size();
  last_txn_ = txn;
  return written;
}

}  // namespace forestfire::ingest
