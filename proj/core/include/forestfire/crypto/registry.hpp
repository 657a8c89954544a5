#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "forestfire/crypto/bytes.hpp"
#include "forestfire/crypto/key_pool.hpp"
#include "forestfire/crypto/random.hpp"

namespace forestfire::crypto {

// What the service knows about a provisioned device. The pool seed is the
// node-side secret; it is present in files written by keygen and absent from
// a service-only export.
struct DeviceRecord {
  std::string device_id;
  std::string area_id;
  AesKey aes_key{};
  Digest merkle_root{};
  std::size_t pool_size = kDefaultPoolSize;
  std::optional<Digest> pool_seed;

  std::size_t tree_depth() const;
};

struct DeviceSpec {
  std::string device_id;
  std::string area_id;
};

class KeyRegistry {
 public:
  // Throws ConfigError on a duplicate device id or an invalid IMEI.
  void add(DeviceRecord record);

  const DeviceRecord* find(std::string_view device_id) const;
  std::size_t size() const { return devices_.size(); }
  std::vector<const DeviceRecord*> devices() const;

  // Rebuilds the device's key pool from its seed. Throws ConfigError if the
  // registry has no seed for it.
  std::unique_ptr<NodeKeyState> node_keys(std::string_view device_id) const;

  nlohmann::json to_json(bool include_secrets = true) const;
  static KeyRegistry from_json(const nlohmann::json& j);

  // Writes with mode 0600. Refuses to overwrite unless `overwrite`.
  void save(const std::filesystem::path& path, bool overwrite = false) const;
  static KeyRegistry load(const std::filesystem::path& path);

 private:
  std::map<std::string, DeviceRecord, std::less<>> devices_;
};

// Offline provisioning: a fresh AES-256 key and one-time key pool per device.
KeyRegistry predistribute_keys(std::span<const DeviceSpec> devices, RandomSource& rng,
                               std::size_t pool_size = kDefaultPoolSize);

}  // namespace forestfire::crypto
