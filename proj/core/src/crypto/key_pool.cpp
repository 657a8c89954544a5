#include "forestfire/crypto/key_pool.hpp"

#include "forestfire/error.hpp"

namespace forestfire::crypto {
namespace {

MerkleTree build_pool_tree(const Digest& seed, std::size_t pool_size) {
  if (pool_size == 0 || (pool_size & (pool_size - 1)) != 0) {
    throw CryptoError("key pool size must be a power of two");
  }
  std::vector<Digest> leaves(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) {
    DeterministicRandom rng(seed, i);
    leaves[i] = LamportKeyPair::generate(rng).public_key().leaf_hash();
  }
  return MerkleTree::build(std::move(leaves));
}

}  // namespace

NodeKeyState::NodeKeyState(std::string device_id, const Digest& pool_seed, std::size_t pool_size,
                           std::size_t next_unused)
    : device_id_(std::move(device_id)),
      pool_seed_(pool_seed),
      tree_(build_pool_tree(pool_seed, pool_size)),
      next_unused_(next_unused) {
  if (next_unused > pool_size) throw CryptoError("next unused index beyond pool size");
}

LamportKeyPair NodeKeyState::leaf_key_pair(std::size_t index) const {
  if (index >= pool_size()) throw CryptoError("leaf index beyond pool size");
  DeterministicRandom rng(pool_seed_, index);
  return LamportKeyPair::generate(rng);
}

LamportSignature NodeKeyState::sign_package(ByteView plaintext) {
  std::size_t index = next_unused_.load();
  do {
    if (index >= pool_size()) {
      throw KeyPoolExhausted("device " + device_id_ + " has used all " + std::to_string(pool_size()) +
                             " one-time keys; re-provision it");
    }
  } while (!next_unused_.compare_exchange_weak(index, index + 1));

  LamportKeyPair pair = leaf_key_pair(index);
  LamportSignature signature;
  signature.key_index = static_cast<std::uint32_t>(index);
  signature.auth_path = tree_.prove(index);
  signature.revealed = pair.sign(plaintext);
  signature.leaf_public_key = pair.public_key();
  return signature;
}

bool verify_package(const Digest& root, ByteView plaintext, const LamportSignature& signature) {
  if (!lamport_verify(signature.leaf_public_key, plaintext, signature.revealed)) return false;
  return merkle_verify(root, signature.leaf_public_key.leaf_hash(), signature.key_index, signature.auth_path);
}

}  // namespace forestfire::crypto
