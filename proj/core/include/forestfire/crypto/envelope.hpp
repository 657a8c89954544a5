#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "forestfire/crypto/bytes.hpp"
#include "forestfire/crypto/key_pool.hpp"
#include "forestfire/crypto/random.hpp"

namespace forestfire::crypto {

inline constexpr std::uint8_t kEnvelopeVersion = 1;
inline constexpr std::size_t kDeviceIdSize = 15;

// Wire layout, all integers big-endian:
//   version(1) | device-id(15 ASCII digits) | package-id(16) | iv(16)
//   | plaintext-length(4)
//   | key-index(4) | auth-path(32 x depth) | leaf-pubkey(2 x 256 x 32) | revealed(256 x 32)
//   | ciphertext(rest, multiple of 16)
// The tree depth is not on the wire; the receiver takes it from the registry.
struct Envelope {
  std::uint8_t version = kEnvelopeVersion;
  std::string device_id;
  PackageId package_id{};
  Iv iv{};
  std::uint32_t plaintext_length = 0;
  LamportSignature signature;
  Bytes ciphertext;
};

Bytes encode_envelope(const Envelope& envelope);

// Reads the device id without parsing the rest. Throws CryptoError if the
// buffer is too short for the fixed header.
std::string peek_device_id(ByteView bytes);

// Throws CryptoError on a bad version, a truncated buffer or a ciphertext
// that is not block aligned.
Envelope decode_envelope(ByteView bytes, std::size_t tree_depth);

// Signs the plaintext with the next one-time key, then encrypts it under a
// fresh random IV and package id.
Envelope seal_envelope(NodeKeyState& keys, const AesKey& key, ByteView plaintext, RandomSource& rng);

// Decryption only; the caller verifies the signature on the result.
Bytes open_envelope(const Envelope& envelope, const AesKey& key);

}  // namespace forestfire::crypto
