#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forestfire::crypto {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kDigestSize = 32;
using Digest = std::array<std::uint8_t, kDigestSize>;

using AesKey = std::array<std::uint8_t, 32>;
using Iv = std::array<std::uint8_t, 16>;
using PackageId = std::array<std::uint8_t, 16>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView bytes);
// Throws CryptoError on odd length or a non-hex character.
Bytes from_hex(std::string_view hex);

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex);

std::string to_base64(ByteView bytes);
// Throws CryptoError on malformed input.
Bytes from_base64(std::string_view text);

// Comparison whose running time does not depend on where the inputs differ.
bool constant_time_equal(ByteView a, ByteView b);

}  // namespace forestfire::crypto
