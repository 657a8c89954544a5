#include "forestfire/crypto/aes_cbc.hpp"

#include <memory>

#include <openssl/evp.h>

#include "forestfire/error.hpp"

namespace forestfire::crypto {
namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

Bytes run_cbc(const AesKey& key, const Iv& iv, ByteView input, bool encrypt) {
  if (input.size() % kAesBlockSize != 0) {
    throw CryptoError("AES-CBC input is not a multiple of 16 bytes");
  }
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw CryptoError("cannot allocate cipher context");
  if (EVP_CipherInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, key.data(), iv.data(), encrypt ? 1 : 0) != 1) {
    throw CryptoError("AES-256-CBC init failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  Bytes out(input.size());
  int produced = 0;
  if (!input.empty() &&
      EVP_CipherUpdate(ctx.get(), out.data(), &produced, input.data(), static_cast<int>(input.size())) != 1) {
    throw CryptoError("AES-256-CBC update failed");
  }
  int tail = 0;
  if (EVP_CipherFinal_ex(ctx.get(), out.data() + produced, &tail) != 1) {
    throw CryptoError("AES-256-CBC final failed");
  }
  out.resize(static_cast<std::size_t>(produced + tail));
  return out;
}

}  // namespace

Bytes aes256_cbc_encrypt_blocks(const AesKey& key, const Iv& iv, ByteView plaintext) {
  return run_cbc(key, iv, plaintext, true);
}

Bytes aes256_cbc_decrypt_blocks(const AesKey& key, const Iv& iv, ByteView ciphertext) {
  return run_cbc(key, iv, ciphertext, false);
}

Bytes encrypt_envelope(const AesKey& key, const Iv& iv, ByteView plaintext) {
  Bytes padded(plaintext.begin(), plaintext.end());
  padded.resize((plaintext.size() + kAesBlockSize - 1) / kAesBlockSize * kAesBlockSize, 0);
  return aes256_cbc_encrypt_blocks(key, iv, padded);
}

Bytes decrypt_envelope(const AesKey& key, const Iv& iv, ByteView ciphertext, std::uint32_t plaintext_length) {
  if (ciphertext.size() % kAesBlockSize != 0) {
    throw CryptoError("ciphertext is not a multiple of 16 bytes");
  }
  if (plaintext_length > ciphertext.size() || ciphertext.size() - plaintext_length >= kAesBlockSize) {
    throw CryptoError("plaintext length does not match ciphertext size");
  }
  Bytes plain = aes256_cbc_decrypt_blocks(key, iv, ciphertext);
  for (std::size_t i = plaintext_length; i < plain.size(); ++i) {
    if (plain[i] != 0) throw CryptoError("non-zero padding");
  }
  plain.resize(plaintext_length);
  return plain;
}

}  // namespace forestfire::crypto
