#include "forestfire/crypto/random.hpp"

#include <algorithm>

#include <openssl/rand.h>

#include "forestfire/crypto/sha256.hpp"
#include "forestfire/error.hpp"

namespace forestfire::crypto {
namespace {

std::array<std::uint8_t, 8> big_endian(std::uint64_t v) {
  std::array<std::uint8_t, 8> out{};
  for (int i = 7; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  return out;
}

}  // namespace

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw CryptoError("system random generator failed");
  }
}

DeterministicRandom::DeterministicRandom(const Digest& seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

void DeterministicRandom::fill(std::span<std::uint8_t> out) {
  std::size_t written = 0;
  while (written < out.size()) {
    if (used_ == kDigestSize) {
      const auto stream = big_endian(stream_);
      const auto counter = big_endian(counter_++);
      block_ = sha256({seed_, stream, counter});
      used_ = 0;
    }
    const std::size_t n = std::min(out.size() - written, kDigestSize - used_);
    std::copy_n(block_.begin() + static_cast<std::ptrdiff_t>(used_), n,
                out.begin() + static_cast<std::ptrdiff_t>(written));
    used_ += n;
    written += n;
  }
}

}  // namespace forestfire::crypto
