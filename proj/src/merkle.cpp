#include "chainless/merkle.hpp"

namespace chainless {

Digest merkle_node(const Digest& left, const Digest& right) {
    ByteWriter w;
    put_digest(w, left);
    put_digest(w, right);
    Bytes b = w.take();
    return sha256(b);
}

static std::vector<Digest> reduce_level(const std::vector<Digest>& level) {
    std::vector<Digest> next;
    next.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i < level.size(); i += 2) {
        const Digest& l = level[i];
        const Digest& r = (i + 1 < level.size()) ? level[i + 1] : level[i];
        next.push_back(merkle_node(l, r));
    }
    return next;
}

Digest merkle_root(const std::vector<Digest>& leaves) {
    if (leaves.empty()) return Digest::zero();
    std::vector<Digest> level = leaves;
    // A single leaf still hashes once with itself under the duplicate rule.
    do {
        level = reduce_level(level);
    } while (level.size() > 1);
    return level[0];
}

MerkleProof merkle_proof(const std::vector<Digest>& leaves, uint64_t index) {
    if (index >= leaves.size()) throw Error(Errc::out_of_range, "merkle_proof: index out of range");
    MerkleProof proof;
    proof.index = index;
    std::vector<Digest> level = leaves;
    uint64_t pos = index;
    do {
        uint64_t sib = (pos % 2 == 0) ? pos + 1 : pos - 1;
        if (sib >= level.size()) sib = pos;  // duplicated final node
        proof.path.push_back({level[sib], sib < pos});
        level = reduce_level(level);
        pos /= 2;
    } while (level.size() > 1);
    return proof;
}

bool verify_merkle_proof(const Digest& root, const Digest& leaf, const MerkleProof& proof) {
    Digest h = leaf;
    for (const auto& step : proof.path)
        h = step.left ? merkle_node(step.sibling, h) : merkle_node(h, step.sibling);
    return h == root;
}

}  // namespace chainless
