#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "forestfire/crypto/bytes.hpp"
#include "forestfire/crypto/lamport.hpp"
#include "forestfire/crypto/merkle.hpp"

namespace forestfire::crypto {

inline constexpr std::size_t kDefaultPoolSize = 1024;

// One-time signature plus the material to tie its key to a device's Merkle root.
struct LamportSignature {
  std::uint32_t key_index = 0;
  std::vector<Digest> auth_path;
  LamportPublicKey leaf_public_key;
  std::vector<Digest> revealed;
};

// A device's pool of one-time Lamport keys certified by one Merkle root.
//
// Leaf i's key pair is generated from a DeterministicRandom stream keyed by
// the pool seed and i, so only the seed and the tree are kept in memory.
// The next-unused counter only moves forward; a leaf is never handed out twice.
class NodeKeyState {
 public:
  // Builds the full tree; cost is linear in pool_size (power of two).
  NodeKeyState(std::string device_id, const Digest& pool_seed, std::size_t pool_size = kDefaultPoolSize,
               std::size_t next_unused = 0);

  NodeKeyState(const NodeKeyState&) = delete;
  NodeKeyState& operator=(const NodeKeyState&) = delete;

  const std::string& device_id() const { return device_id_; }
  const Digest& root() const { return tree_.root(); }
  const Digest& pool_seed() const { return pool_seed_; }
  std::size_t pool_size() const { return tree_.leaf_count(); }
  std::size_t depth() const { return tree_.depth(); }
  std::size_t next_unused() const { return next_unused_.load(); }
  std::size_t remaining() const { return pool_size() - next_unused(); }
  const MerkleTree& tree() const { return tree_; }

  LamportKeyPair leaf_key_pair(std::size_t index) const;

  // Signs with the next unused leaf. Throws KeyPoolExhausted when none is left.
  LamportSignature sign_package(ByteView plaintext);

 private:
  std::string device_id_;
  Digest pool_seed_;
  MerkleTree tree_;
  std::atomic<std::size_t> next_unused_;
};

// True iff the one-time signature is valid and its key is a leaf of `root`
// at the claimed index.
bool verify_package(const Digest& root, ByteView plaintext, const LamportSignature& signature);

}  // namespace forestfire::crypto
