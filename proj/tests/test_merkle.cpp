#include "doctest.h"

#include "chainless/merkle.hpp"
#include "chainless/rng.hpp"

using namespace chainless;

namespace {

Digest leaf(uint8_t fill) {
    Digest d;
    d.v.fill(fill);
    return d;
}

// Independent pair hash, bypassing merkle_node.
Digest pair_hash(const Digest& a, const Digest& b) {
    Bytes buf(a.v.begin(), a.v.end());
    buf.insert(buf.end(), b.v.begin(), b.v.end());
    return sha256(buf);
}

std::vector<Digest> random_leaves(Rng& rng, size_t n) {
    std::vector<Digest> out;
    for (size_t i = 0; i < n; ++i) {
        ByteWriter w;
        w.u64(rng.next());
        Bytes b = w.take();
        out.push_back(sha256(b));
    }
    return out;
}

}  // namespace

TEST_CASE("empty tree is the all-zero sentinel") {
    CHECK(merkle_root({}) == Digest::zero());
}

TEST_CASE("single leaf hashes with itself") {
    Digest d1 = leaf(0x11);
    CHECK(merkle_root({d1}) == pair_hash(d1, d1));
}

TEST_CASE("three leaves expand to H(H(d1,d2), H(d3,d3))") {
    Digest d1 = leaf(1), d2 = leaf(2), d3 = leaf(3);
    Digest expected = pair_hash(pair_hash(d1, d2), pair_hash(d3, d3));
    CHECK(merkle_root({d1, d2, d3}) == expected);
}

TEST_CASE("proof for a single leaf is the self-sibling path") {
    Digest d1 = leaf(0xaa);
    MerkleProof p = merkle_proof({d1}, 0);
    REQUIRE(p.path.size() == 1);
    CHECK(p.path[0].sibling == d1);
    CHECK(verify_merkle_proof(merkle_root({d1}), d1, p));
}

TEST_CASE("four-leaf proof at index 2: sibling d4 then H(d1,d2)") {
    std::vector<Digest> ls = {leaf(1), leaf(2), leaf(3), leaf(4)};
    MerkleProof p = merkle_proof(ls, 2);
    REQUIRE(p.path.size() == 2);
    CHECK(p.path[0].sibling == ls[3]);
    CHECK_FALSE(p.path[0].left);
    CHECK(p.path[1].sibling == pair_hash(ls[0], ls[1]));
    CHECK(p.path[1].left);
    CHECK(verify_merkle_proof(merkle_root(ls), ls[2], p));
}

TEST_CASE("out-of-range index") {
    std::vector<Digest> ls = {leaf(1), leaf(2)};
    CHECK_THROWS_AS((void)merkle_proof(ls, 2), Error);
}

TEST_CASE("proof for index i never verifies leaf at j != i (8-leaf brute force)") {
    Rng rng(7);
    auto ls = random_leaves(rng, 8);
    Digest root = merkle_root(ls);
    for (uint64_t i = 0; i < 8; ++i) {
        MerkleProof p = merkle_proof(ls, i);
        for (uint64_t j = 0; j < 8; ++j) {
            bool ok = verify_merkle_proof(root, ls[j], p);
            CHECK(ok == (i == j || ls[i] == ls[j]));
        }
    }
}

TEST_CASE("desk-scale soundness: trees up to 64 leaves, every bit flip fails") {
    Rng rng(42);
    for (size_t n : {1, 2, 3, 5, 8, 13, 33, 64}) {
        auto ls = random_leaves(rng, n);
        Digest root = merkle_root(ls);
        for (uint64_t i = 0; i < n; ++i) {
            MerkleProof p = merkle_proof(ls, i);
            REQUIRE(verify_merkle_proof(root, ls[i], p));

            // one random bit flip in each of leaf, root, path
            size_t bit = size_t(rng.below(256));
            Digest bad_leaf = ls[i];
            bad_leaf.v[bit / 8] ^= uint8_t(1u << (bit % 8));
            CHECK_FALSE(verify_merkle_proof(root, bad_leaf, p));

            bit = size_t(rng.below(256));
            Digest bad_root = root;
            bad_root.v[bit / 8] ^= uint8_t(1u << (bit % 8));
            CHECK_FALSE(verify_merkle_proof(bad_root, ls[i], p));

            MerkleProof bad_path = p;
            size_t step = size_t(rng.below(uint64_t(bad_path.path.size())));
            bit = size_t(rng.below(256));
            bad_path.path[step].sibling.v[bit / 8] ^= uint8_t(1u << (bit % 8));
            CHECK_FALSE(verify_merkle_proof(root, ls[i], bad_path));
        }
    }
}
