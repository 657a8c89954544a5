#include "forestfire/ingest/event_bus.hpp"

#include <algorithm>

namespace forestfire::ingest {

void EventBus::publish(std::vector<StreamEvent> events) {
  if (events.empty()) return;
  {
    std::lock_guard lock(mu_);
    for (auto& e : events) events_.push_back(std::move(e));
    while (events_.size() > retention_) events_.pop_front();
  }
  cv_.notify_all();
}

std::vector<StreamEvent> EventBus::collect(std::uint64_t after, std::size_t limit) const {
  auto it = std::upper_bound(events_.begin(), events_.end(), after,
                             [](std::uint64_t s, const StreamEvent& e) { return s < e.seq; });
  std::vector<StreamEvent> out;
  for (; it != events_.end() && out.size() < limit; ++it) out.push_back(*it);
  return out;
}

std::vector<StreamEvent> EventBus::since(std::uint64_t after, std::size_t limit) const {
  std::lock_guard lock(mu_);
  return collect(after, limit);
}

std::vector<StreamEvent> EventBus::wait(std::uint64_t after, std::chrono::milliseconds timeout,
                                        std::size_t limit) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || (!events_.empty() && events_.back().seq > after); });
  if (closed_) return {};
  return collect(after, limit);
}

void EventBus::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool EventBus::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::uint64_t EventBus::last_seq() const {
  std::lock_guard lock(mu_);
  return events_.empty() ? 0 : events_.back().seq;
}

std::uint64_t EventBus::first_seq() const {
  std::lock_guard lock(mu_);
  return events_.empty() ? 0 : events_.front().seq;
}

}  // namespace forestfire::ingest
