#include "forestfire/crypto/lamport.hpp"

#include "forestfire/crypto/sha256.hpp"
#include "forestfire/error.hpp"

namespace forestfire::crypto {

LamportPublicKey::LamportPublicKey(std::vector<Digest> elements) : elements_(std::move(elements)) {
  if (elements_.size() != kLamportElements) throw CryptoError("Lamport public key needs 512 elements");
}

Bytes LamportPublicKey::serialize() const {
  Bytes out;
  out.reserve(kLamportElements * kDigestSize);
  for (const Digest& d : elements_) out.insert(out.end(), d.begin(), d.end());
  return out;
}

LamportPublicKey LamportPublicKey::deserialize(ByteView bytes) {
  if (bytes.size() != kLamportElements * kDigestSize) {
    throw CryptoError("serialized Lamport public key must be 16384 bytes");
  }
  std::vector<Digest> elements(kLamportElements);
  for (std::size_t i = 0; i < kLamportElements; ++i) {
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(i * kDigestSize), kDigestSize, elements[i].begin());
  }
  return LamportPublicKey(std::move(elements));
}

Digest LamportPublicKey::leaf_hash() const {
  return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(elements_.data()),
                         elements_.size() * kDigestSize));
}

LamportKeyPair LamportKeyPair::generate(RandomSource& rng) {
  LamportKeyPair pair;
  pair.secret_.resize(kLamportElements);
  std::vector<Digest> pub(kLamportElements);
  for (std::size_t i = 0; i < kLamportElements; ++i) {
    rng.fill(pair.secret_[i]);
    pub[i] = sha256(pair.secret_[i]);
  }
  pair.public_ = LamportPublicKey(std::move(pub));
  return pair;
}

std::vector<Digest> LamportKeyPair::sign(ByteView message) {
  if (used_) throw CryptoError("Lamport key pair already used; one-time keys never sign twice");
  used_ = true;
  const Digest digest = sha256(message);
  std::vector<Digest> revealed(kLamportBits);
  for (std::size_t i = 0; i < kLamportBits; ++i) {
    revealed[i] = secret_[2 * i + (digest_bit(digest, i) ? 1 : 0)];
  }
  return revealed;
}

bool lamport_verify(const LamportPublicKey& key, ByteView message, std::span<const Digest> revealed) {
  if (revealed.size() != kLamportBits || key.elements().size() != kLamportElements) return false;
  const Digest digest = sha256(message);
  bool ok = true;
  for (std::size_t i = 0; i < kLamportBits; ++i) {
    const Digest h = sha256(revealed[i]);
    ok &= constant_time_equal(h, key.element(i, digest_bit(digest, i) ? 1 : 0));
  }
  return ok;
}

}  // namespace forestfire::crypto
