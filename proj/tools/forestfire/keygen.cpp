#include <iostream>

#include "commands.hpp"
#include "forestfire/crypto/registry.hpp"
#include "forestfire/crypto/sha256.hpp"
#include "forestfire/risk/measurement.hpp"

namespace forestfire::cli {

namespace {

struct KeygenArgs {
  std::vector<std::string> devices;
  std::string out;
  bool force = false;
  std::size_t pool_size = crypto::kDefaultPoolSize;
  std::optional<std::uint64_t> seed;
};

std::vector<crypto::DeviceSpec> parse_devices(const std::vector<std::string>& items) {
  std::vector<crypto::DeviceSpec> specs;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw UsageError("device '" + item + "' must be IMEI=area");
    }
    crypto::DeviceSpec d{item.substr(0, eq), item.substr(eq + 1)};
    if (!risk::is_valid_imei(d.device_id)) throw UsageError("'" + d.device_id + "' is not a 15-digit IMEI");
    specs.push_back(std::move(d));
  }
  return specs;
}

}  // namespace

Action add_keygen(CLI::App& app) {
  auto args = std::make_shared<KeygenArgs>();
  auto* cmd = app.add_subcommand("keygen", "Provision AES keys and one-time signature pools for devices");
  cmd->add_option("--devices", args->devices, "Comma-separated IMEI=area pairs")->required()->delimiter(',');
  cmd->add_option("--out", args->out, "Registry file to write (mode 0600)")->required();
  cmd->add_flag("--force", args->force, "Overwrite an existing registry");
  cmd->add_option("--pool-size", args->pool_size, "One-time keys per device (power of two)")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 16));
  cmd->add_option("--seed", args->seed, "Derive keys deterministically (testing only)");

  return [args] {
    const auto specs = parse_devices(args->devices);
    if (!std::has_single_bit(args->pool_size)) throw UsageError("--pool-size must be a power of two");
    if (!args->force && std::filesystem::exists(args->out)) {
      throw UsageError(args->out + " exists; pass --force to overwrite");
    }
    crypto::KeyRegistry registry;
    if (args->seed) {
      std::array<std::uint8_t, 8> be{};
      for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(*args->seed >> (56 - 8 * i));
      crypto::DeterministicRandom rng(crypto::sha256({crypto::as_bytes("forestfire-keygen"), be}), 0);
      registry = crypto::predistribute_keys(specs, rng, args->pool_size);
    } else {
      crypto::SystemRandom rng;
      registry = crypto::predistribute_keys(specs, rng, args->pool_size);
    }
    registry.save(args->out, args->force);
    std::cout << "wrote " << registry.size() << " devices to " << args->out << "\n";
    return 0;
  };
}

}  // namespace forestfire::cli
