#pragma once

#include <vector>

#include "chainless/digest.hpp"

namespace chainless {

/// Inclusion path for a binary Merkle tree with the duplicate-last padding
/// rule. `left` tells whether the sibling sits to the left of the running
/// hash at that level.
struct MerkleStep {
    Digest sibling;
    bool left = false;
};

struct MerkleProof {
    uint64_t index = 0;
    std::vector<MerkleStep> path;
};

/// Root of a binary tree over `leaves`. Odd layers duplicate their final
/// node; the empty tree is the all-zero digest. A single leaf hashes with
/// itself (the duplicate rule applied at the bottom layer).
Digest merkle_root(const std::vector<Digest>& leaves);

/// Proof for `leaves[index]`; throws Errc::out_of_range when index is past
/// the end.
MerkleProof merkle_proof(const std::vector<Digest>& leaves, uint64_t index);

bool verify_merkle_proof(const Digest& root, const Digest& leaf, const MerkleProof& proof);

Digest merkle_node(const Digest& left, const Digest& right);

}  // namespace chainless
