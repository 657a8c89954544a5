#pragma once

#include <cstdint>

#include "forestfire/crypto/bytes.hpp"

namespace forestfire::crypto {

inline constexpr std::size_t kAesBlockSize = 16;

// AES-256-CBC over whole blocks, no padding. Throws CryptoError when the
// input is not a multiple of the block size.
Bytes aes256_cbc_encrypt_blocks(const AesKey& key, const Iv& iv, ByteView plaintext);
Bytes aes256_cbc_decrypt_blocks(const AesKey& key, const Iv& iv, ByteView ciphertext);

// Zero-pads the plaintext to the next block boundary (nothing is added when
// it is already aligned) and encrypts.
Bytes encrypt_envelope(const AesKey& key, const Iv& iv, ByteView plaintext);

// Decrypts and truncates to plaintext_length. Throws CryptoError if the
// ciphertext is not block aligned or shorter than plaintext_length, or if the
// padding bytes are not zero.
Bytes decrypt_envelope(const AesKey& key, const Iv& iv, ByteView ciphertext,
                       std::uint32_t plaintext_length);

}  // namespace forestfire::crypto
