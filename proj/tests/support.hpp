#pragma once

// Shared fixtures: provisioned devices and sealed envelopes for ingest tests.

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <unistd.h>

#include "forestfire/crypto/envelope.hpp"
#include "forestfire/crypto/random.hpp"
#include "forestfire/crypto/registry.hpp"
#include "forestfire/crypto/sha256.hpp"
#include "forestfire/risk/measurement.hpp"

namespace forestfire::test {

inline crypto::Digest fixed_seed(std::string_view label) { return crypto::sha256(crypto::as_bytes(label)); }

class Fleet {
 public:
  explicit Fleet(std::vector<crypto::DeviceSpec> devices, std::size_t pool_size = 64)
      : rng_(fixed_seed("fleet"), 0) {
    registry_ = crypto::predistribute_keys(devices, rng_, pool_size);
    for (const auto& d : devices) keys_[d.device_id] = registry_.node_keys(d.device_id);
  }

  const crypto::KeyRegistry& registry() const { return registry_; }
  crypto::NodeKeyState& keys(const std::string& device) { return *keys_.at(device); }

  crypto::Bytes seal(const risk::Measurement& m) {
    const std::string text = risk::serialize(m);
    const auto env = crypto::seal_envelope(keys(m.device_id), registry_.find(m.device_id)->aes_key,
                                           crypto::as_bytes(text), rng_);
    return crypto::encode_envelope(env);
  }

 private:
  crypto::DeterministicRandom rng_;
  crypto::KeyRegistry registry_;
  std::map<std::string, std::unique_ptr<crypto::NodeKeyState>> keys_;
};

inline risk::Measurement sample(const std::string& device, const std::string& area, risk::Timestamp t) {
  risk::Measurement m;
  m.device_id = device;
  m.area_id = area;
  m.timestamp = t;
  m.location = {40.2, 23.3};
  m.battery = 80;
  m.values = {25, 50, 10, 40, 300, 0.5, 21};
  return m;
}

class TempDir {
 public:
  explicit TempDir(std::string_view tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ff-" + std::string(tag) + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace forestfire::test
