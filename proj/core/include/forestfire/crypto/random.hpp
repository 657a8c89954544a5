#pragma once

#include <cstdint>
#include <span>

#include "forestfire/crypto/bytes.hpp"

namespace forestfire::crypto {

class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  template <std::size_t N>
  std::array<std::uint8_t, N> draw() {
    std::array<std::uint8_t, N> out{};
    fill(out);
    return out;
  }
};

// OpenSSL's DRBG seeded from the operating system. Throws CryptoError if the
// generator fails.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// SHA-256 in counter mode: block_i = SHA-256(seed || stream || i). Used for
// reproducible simulations and to expand a per-device pool seed into
// per-leaf one-time keys.
class DeterministicRandom final : public RandomSource {
 public:
  DeterministicRandom(const Digest& seed, std::uint64_t stream);

  void fill(std::span<std::uint8_t> out) override;

 private:
  Digest seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = kDigestSize;
};

}  // namespace forestfire::crypto
