#include "forestfire/crypto/envelope.hpp"

#include <algorithm>

#include "forestfire/crypto/aes_cbc.hpp"
#include "forestfire/error.hpp"

namespace forestfire::crypto {
namespace {

constexpr std::size_t kHeaderSize = 1 + kDeviceIdSize + 16 + 16 + 4;
constexpr std::size_t kPublicKeySize = kLamportElements * kDigestSize;
constexpr std::size_t kRevealedSize = kLamportBits * kDigestSize;

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

template <typename Container>
void put(Bytes& out, const Container& c) {
  out.insert(out.end(), c.begin(), c.end());
}

class Reader {
 public:
  explicit Reader(ByteView bytes) : bytes_(bytes) {}

  ByteView take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw CryptoError("envelope truncated");
    ByteView out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  template <std::size_t N>
  std::array<std::uint8_t, N> array() {
    std::array<std::uint8_t, N> out{};
    const ByteView v = take(N);
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }

  std::uint32_t u32() {
    const ByteView v = take(4);
    return (std::uint32_t{v[0]} << 24) | (std::uint32_t{v[1]} << 16) | (std::uint32_t{v[2]} << 8) | v[3];
  }

  ByteView rest() { return take(bytes_.size() - pos_); }

 private:
  ByteView bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Bytes encode_envelope(const Envelope& e) {
  if (e.device_id.size() != kDeviceIdSize) throw CryptoError("device id must be 15 characters");
  if (e.signature.revealed.size() != kLamportBits) throw CryptoError("signature must reveal 256 values");
  Bytes out;
  out.reserve(kHeaderSize + 4 + e.signature.auth_path.size() * kDigestSize + kPublicKeySize + kRevealedSize +
              e.ciphertext.size());
  out.push_back(e.version);
  put(out, e.device_id);
  put(out, e.package_id);
  put(out, e.iv);
  put_u32(out, e.plaintext_length);
  put_u32(out, e.signature.key_index);
  for (const Digest& d : e.signature.auth_path) put(out, d);
  for (const Digest& d : e.signature.leaf_public_key.elements()) put(out, d);
  for (const Digest& d : e.signature.revealed) put(out, d);
  put(out, e.ciphertext);
  return out;
}

std::string peek_device_id(ByteView bytes) {
  if (bytes.size() < 1 + kDeviceIdSize) throw CryptoError("envelope truncated");
  return std::string(reinterpret_cast<const char*>(bytes.data() + 1), kDeviceIdSize);
}

Envelope decode_envelope(ByteView bytes, std::size_t tree_depth) {
  Reader in(bytes);
  Envelope e;
  e.version = in.take(1)[0];
  if (e.version != kEnvelopeVersion) throw CryptoError("unsupported envelope version " + std::to_string(e.version));
  const ByteView id = in.take(kDeviceIdSize);
  e.device_id.assign(id.begin(), id.end());
  e.package_id = in.array<16>();
  e.iv = in.array<16>();
  e.plaintext_length = in.u32();
  e.signature.key_index = in.u32();
  e.signature.auth_path.resize(tree_depth);
  for (Digest& d : e.signature.auth_path) d = in.array<kDigestSize>();
  e.signature.leaf_public_key = LamportPublicKey::deserialize(in.take(kPublicKeySize));
  e.signature.revealed.resize(kLamportBits);
  for (Digest& d : e.signature.revealed) d = in.array<kDigestSize>();
  const ByteView ciphertext = in.rest();
  if (ciphertext.size() % kAesBlockSize != 0) throw CryptoError("ciphertext is not block aligned");
  e.ciphertext.assign(ciphertext.begin(), ciphertext.end());
  return e;
}

Envelope seal_envelope(NodeKeyState& keys, const AesKey& key, ByteView plaintext, RandomSource& rng) {
  if (plaintext.size() > 0xffffffffULL) throw CryptoError("plaintext too large");
  Envelope e;
  e.device_id = keys.device_id();
  e.signature = keys.sign_package(plaintext);
  rng.fill(e.package_id);
  rng.fill(e.iv);
  e.plaintext_length = static_cast<std::uint32_t>(plaintext.size());
  e.ciphertext = encrypt_envelope(key, e.iv, plaintext);
  return e;
}

Bytes open_envelope(const Envelope& e, const AesKey& key) {
  return decrypt_envelope(key, e.iv, e.ciphertext, e.plaintext_length);
}

}  // namespace forestfire::crypto
