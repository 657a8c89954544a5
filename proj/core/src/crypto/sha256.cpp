#include "forestfire/crypto/sha256.hpp"

#include <memory>

#include <openssl/evp.h>

#include "forestfire/error.hpp"

namespace forestfire::crypto {
namespace {

struct MdDeleter {
  void operator()(EVP_MD* md) const { EVP_MD_free(md); }
};
struct CtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

const EVP_MD* sha256_md() {
  static const std::unique_ptr<EVP_MD, MdDeleter> md(EVP_MD_fetch(nullptr, "SHA256", nullptr));
  if (!md) throw CryptoError("SHA-256 unavailable");
  return md.get();
}

EVP_MD_CTX* thread_context() {
  thread_local const std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx(EVP_MD_CTX_new());
  if (!ctx) throw CryptoError("cannot allocate digest context");
  return ctx.get();
}

}  // namespace

Digest sha256(std::initializer_list<ByteView> parts) {
  EVP_MD_CTX* ctx = thread_context();
  if (EVP_DigestInit_ex(ctx, sha256_md(), nullptr) != 1) throw CryptoError("SHA-256 init failed");
  for (ByteView part : parts) {
    if (EVP_DigestUpdate(ctx, part.data(), part.size()) != 1) throw CryptoError("SHA-256 update failed");
  }
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != kDigestSize) {
    throw CryptoError("SHA-256 final failed");
  }
  return out;
}

Digest sha256(ByteView data) { return sha256({data}); }

}  // namespace forestfire::crypto
