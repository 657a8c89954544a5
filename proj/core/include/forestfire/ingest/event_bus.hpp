#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

namespace forestfire::ingest {

struct StreamEvent {
  std::uint64_t seq = 0;  // event log sequence number
  std::string kind;
  std::string data;  // JSON text

  friend bool operator==(const StreamEvent&, const StreamEvent&) = default;
};

// Bounded in-memory history of published events with blocking reads, used
// to feed server-sent event subscribers. Readers resume from any sequence
// number still retained.
class EventBus {
 public:
  explicit EventBus(std::size_t retention = 10000) : retention_(retention) {}

  // Sequence numbers must increase across calls.
  void publish(std::vector<StreamEvent> events);

  // Retained events with seq > after, at most `limit`.
  std::vector<StreamEvent> since(std::uint64_t after, std::size_t limit = SIZE_MAX) const;

  // Like since(), but waits up to `timeout` for something new. Returns empty
  // on timeout or after close().
  std::vector<StreamEvent> wait(std::uint64_t after, std::chrono::milliseconds timeout,
                                std::size_t limit = SIZE_MAX) const;

  void close();
  bool closed() const;
  std::uint64_t last_seq() const;
  // Oldest retained sequence number, 0 when empty.
  std::uint64_t first_seq() const;

 private:
  std::vector<StreamEvent> collect(std::uint64_t after, std::size_t limit) const;

  std::size_t retention_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::deque<StreamEvent> events_;
  bool closed_ = false;
};

}  // namespace forestfire::ingest
