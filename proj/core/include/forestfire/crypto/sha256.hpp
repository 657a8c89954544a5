#pragma once

#include <initializer_list>

#include "forestfire/crypto/bytes.hpp"

namespace forestfire::crypto {

Digest sha256(ByteView data);

// Digest of the concatenation of `parts`.
Digest sha256(std::initializer_list<ByteView> parts);

}  // namespace forestfire::crypto
