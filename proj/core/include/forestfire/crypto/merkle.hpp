#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "forestfire/crypto/bytes.hpp"

namespace forestfire::crypto {

// Binary hash tree with parent = SHA-256(left || right). A leaf list whose
// size is not a power of two is padded with SHA-256 of the empty string.
class MerkleTree {
 public:
  // Throws CryptoError for an empty leaf list.
  static MerkleTree build(std::vector<Digest> leaves);

  const Digest& root() const { return levels_.back().front(); }
  std::size_t leaf_count() const { return levels_.front().size(); }
  std::size_t depth() const { return levels_.size() - 1; }
  const Digest& leaf(std::size_t index) const { return levels_.front().at(index); }

  // Sibling hashes from the leaf level upwards. Throws std::out_of_range.
  std::vector<Digest> prove(std::size_t index) const;

 private:
  std::vector<std::vector<Digest>> levels_;
};

Digest merkle_parent(const Digest& left, const Digest& right);

bool merkle_verify(const Digest& root, const Digest& leaf, std::size_t index, std::span<const Digest> path);

}  // namespace forestfire::crypto
