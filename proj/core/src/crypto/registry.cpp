#include "forestfire/crypto/registry.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "forestfire/error.hpp"
#include "forestfire/risk/measurement.hpp"

namespace forestfire::crypto {
namespace {

using nlohmann::json;
constexpr std::string_view kFormat = "forestfire-registry";

}  // namespace

std::size_t DeviceRecord::tree_depth() const {
  std::size_t depth = 0;
  while ((std::size_t{1} << depth) < pool_size) ++depth;
  return depth;
}

void KeyRegistry::add(DeviceRecord record) {
  if (!risk::is_valid_imei(record.device_id)) {
    throw ConfigError("device id '" + record.device_id + "' is not a 15-digit IMEI");
  }
  if (record.pool_size == 0 || (record.pool_size & (record.pool_size - 1)) != 0) {
    throw ConfigError("pool size for " + record.device_id + " must be a power of two");
  }
  const std::string id = record.device_id;
  if (!devices_.emplace(id, std::move(record)).second) throw ConfigError("duplicate device id " + id);
}

const DeviceRecord* KeyRegistry::find(std::string_view device_id) const {
  const auto it = devices_.find(device_id);
  return it == devices_.end() ? nullptr : &it->second;
}

std::vector<const DeviceRecord*> KeyRegistry::devices() const {
  std::vector<const DeviceRecord*> out;
  out.reserve(devices_.size());
  for (const auto& [id, record] : devices_) out.push_back(&record);
  return out;
}

std::unique_ptr<NodeKeyState> KeyRegistry::node_keys(std::string_view device_id) const {
  const DeviceRecord* record = find(device_id);
  if (!record) throw ConfigError("unknown device " + std::string(device_id));
  if (!record->pool_seed) throw ConfigError("registry has no key pool secret for " + record->device_id);
  auto keys = std::make_unique<NodeKeyState>(record->device_id, *record->pool_seed, record->pool_size);
  if (keys->root() != record->merkle_root) {
    throw ConfigError("pool secret for " + record->device_id + " does not match its Merkle root");
  }
  return keys;
}

json KeyRegistry::to_json(bool include_secrets) const {
  json devices = json::array();
  for (const auto& [id, r] : devices_) {
    json d{{"device_id", r.device_id},
           {"area_id", r.area_id},
           {"aes_key", to_hex(r.aes_key)},
           {"merkle_root", to_hex(r.merkle_root)},
           {"pool_size", r.pool_size}};
    if (include_secrets && r.pool_seed) d["pool_seed"] = to_hex(*r.pool_seed);
    devices.push_back(std::move(d));
  }
  return json{{"format", kFormat}, {"version", 1}, {"devices", std::move(devices)}};
}

KeyRegistry KeyRegistry::from_json(const json& j) {
  try {
    if (j.value("format", "") != kFormat) throw ConfigError("not a registry file");
    if (j.at("version").get<int>() != 1) throw ConfigError("unsupported registry version");
    KeyRegistry registry;
    for (const json& d : j.at("devices")) {
      DeviceRecord r;
      r.device_id = d.at("device_id").get<std::string>();
      r.area_id = d.at("area_id").get<std::string>();
      r.aes_key = array_from_hex<32>(d.at("aes_key").get<std::string>());
      r.merkle_root = array_from_hex<32>(d.at("merkle_root").get<std::string>());
      r.pool_size = d.value("pool_size", kDefaultPoolSize);
      if (d.contains("pool_seed")) r.pool_seed = array_from_hex<32>(d.at("pool_seed").get<std::string>());
      registry.add(std::move(r));
    }
    return registry;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed registry: ") + e.what());
  } catch (const CryptoError& e) {
    throw ConfigError(std::string("malformed registry: ") + e.what());
  }
}

void KeyRegistry::save(const std::filesystem::path& path, bool overwrite) const {
  const std::string text = to_json().dump(2) + "\n";
  const int flags = O_WRONLY | O_CREAT | (overwrite ? O_TRUNC : O_EXCL);
  const int fd = ::open(path.c_str(), flags, 0600);
  if (fd < 0) {
    throw ConfigError("cannot create registry " + path.string() + ": " + std::strerror(errno));
  }
  ::fchmod(fd, 0600);
  std::size_t written = 0;
  while (written < text.size()) {
    const ssize_t n = ::write(fd, text.data() + written, text.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw ConfigError("cannot write registry " + path.string());
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

KeyRegistry KeyRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open registry " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("registry " + path.string() + " is not valid JSON");
  return from_json(j);
}

KeyRegistry predistribute_keys(std::span<const DeviceSpec> devices, RandomSource& rng, std::size_t pool_size) {
  KeyRegistry registry;
  for (const DeviceSpec& spec : devices) {
    if (registry.find(spec.device_id)) throw ConfigError("duplicate device id " + spec.device_id);
    DeviceRecord record;
    record.device_id = spec.device_id;
    record.area_id = spec.area_id;
    record.pool_size = pool_size;
    rng.fill(record.aes_key);
    Digest seed{};
    rng.fill(seed);
    record.pool_seed = seed;
    record.merkle_root = NodeKeyState(spec.device_id, seed, pool_size).root();
    registry.add(std::move(record));
  }
  return registry;
}

}  // namespace forestfire::crypto
