#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "forestfire/crypto/bytes.hpp"
#include "forestfire/crypto/random.hpp"

namespace forestfire::crypto {

// Lamport one-time signatures over SHA-256: one secret pair per digest bit.
inline constexpr std::size_t kLamportBits = 256;
inline constexpr std::size_t kLamportElements = 2 * kLamportBits;

// Bit i of a digest, most significant bit of byte 0 first.
inline bool digest_bit(const Digest& d, std::size_t i) {
  return (d[i / 8] >> (7 - (i % 8))) & 1U;
}

class LamportPublicKey {
 public:
  LamportPublicKey() : elements_(kLamportElements) {}
  explicit LamportPublicKey(std::vector<Digest> elements);

  const Digest& element(std::size_t bit, int value) const { return elements_[2 * bit + value]; }
  const std::vector<Digest>& elements() const { return elements_; }

  // 2 x 256 x 32 bytes: element (0,0), (0,1), (1,0), ...
  Bytes serialize() const;
  static LamportPublicKey deserialize(ByteView bytes);

  // Merkle leaf: SHA-256 of serialize().
  Digest leaf_hash() const;

  friend bool operator==(const LamportPublicKey&, const LamportPublicKey&) = default;

 private:
  std::vector<Digest> elements_;
};

class LamportKeyPair {
 public:
  // Draws 512 fresh 32-byte secrets from rng.
  static LamportKeyPair generate(RandomSource& rng);

  const LamportPublicKey& public_key() const { return public_; }
  const Digest& secret(std::size_t bit, int value) const { return secret_[2 * bit + value]; }
  bool used() const { return used_; }

  // Reveals secret[i][bit_i(SHA-256(message))] for every i and marks the
  // pair used. Throws CryptoError if the pair already signed something.
  std::vector<Digest> sign(ByteView message);

 private:
  LamportKeyPair() = default;

  std::vector<Digest> secret_;
  LamportPublicKey public_;
  bool used_ = false;
};

// False on a wrong-sized signature or any mismatching element.
bool lamport_verify(const LamportPublicKey& key, ByteView message, std::span<const Digest> revealed);

}  // namespace forestfire::crypto
