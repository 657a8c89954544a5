#include "forestfire/crypto/merkle.hpp"

#include <stdexcept>

#include "forestfire/crypto/sha256.hpp"
#include "forestfire/error.hpp"

namespace forestfire::crypto {

Digest merkle_parent(const Digest& left, const Digest& right) { return sha256({left, right}); }

MerkleTree MerkleTree::build(std::vector<Digest> leaves) {
  if (leaves.empty()) throw CryptoError("Merkle tree needs at least one leaf");
  std::size_t width = 1;
  while (width < leaves.size()) width *= 2;
  if (width != leaves.size()) leaves.resize(width, sha256(ByteView{}));

  MerkleTree tree;
  tree.levels_.push_back(std::move(leaves));
  while (tree.levels_.back().size() > 1) {
    const std::vector<Digest>& below = tree.levels_.back();
    std::vector<Digest> level(below.size() / 2);
    for (std::size_t i = 0; i < level.size(); ++i) level[i] = merkle_parent(below[2 * i], below[2 * i + 1]);
    tree.levels_.push_back(std::move(level));
  }
  return tree;
}

std::vector<Digest> MerkleTree::prove(std::size_t index) const {
  if (index >= leaf_count()) throw std::out_of_range("Merkle leaf index out of range");
  std::vector<Digest> path;
  path.reserve(depth());
  for (std::size_t level = 0; level < depth(); ++level) {
    path.push_back(levels_[level][index ^ 1U]);
    index >>= 1U;
  }
  return path;
}

bool merkle_verify(const Digest& root, const Digest& leaf, std::size_t index, std::span<const Digest> path) {
  if (path.size() < 64 && (index >> path.size()) != 0) return false;
  Digest node = leaf;
  for (const Digest& sibling : path) {
    node = (index & 1U) ? merkle_parent(sibling, node) : merkle_parent(node, sibling);
    index >>= 1U;
  }
  return constant_time_equal(node, root);
}

}  // namespace forestfire::crypto
