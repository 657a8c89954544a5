#pragma once

#include <memory>

#include "forestfire/ingest/ingest_core.hpp"
#include "forestfire/service/auth.hpp"
#include "forestfire/service/config.hpp"

namespace forestfire::service {

// HTTP+JSON front end over IngestCore with bearer-token auth and a
// server-sent event stream at GET /events.
class Server {
 public:
  // Opens the event log (replaying it), loads the registry and rule base.
  // Throws ConfigError on missing or invalid inputs.
  explicit Server(ServiceConfig config, TokenStore::Clock clock = {});
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts the accept loop on a background thread; returns the
  // bound port. Throws Error if the address cannot be bound.
  int start();
  // Blocks until stop() is called from another thread.
  void wait();
  // Ends event streams, stops accepting and joins. Idempotent.
  void stop();

  int port() const;
  const ServiceConfig& config() const;
  ingest::IngestCore& core();
  TokenStore& tokens();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace forestfire::service
