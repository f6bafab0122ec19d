#include "chainless/da.hpp"

namespace chainless::da {

Digest DaStore::publish(const TraceBlock& block, DaPolicy policy) {
    Entry e;
    e.mode = policy.mode;
    e.commitment = {block.block_no, block.block_hash, block.pre_root, block.post_root,
                    block.transitions_root};
    if (policy.mode == DaMode::public_full) e.block_bytes = block.serialize();
    if (!entries_.count(block.block_hash)) order_.push_back(block.block_hash);
    entries_[block.block_hash] = std::move(e);
    return block.block_hash;
}

TraceBlock DaStore::fetch_block(const Digest& reference) const {
    auto it = entries_.find(reference);
    if (it == entries_.end()) throw Error(Errc::unknown_reference, "unknown DA reference");
    if (it->second.mode == DaMode::private_commitment)
        throw Error(Errc::data_unavailable,
                    "trace payload stored privately; only the commitment is retrievable");
    ByteReader r(it->second.block_bytes);
    TraceBlock block;
    try {
        block = TraceBlock::deserialize(r);
    } catch (const Error&) {
        throw Error(Errc::digest_mismatch, "stored trace bytes are corrupt");
    }
    if (block.compute_hash() != reference || block.block_hash != reference ||
        merkle_root(transition_leaves(block.transitions)) != block.transitions_root)
        throw Error(Errc::digest_mismatch, "stored trace does not hash to its reference");
    return block;
}

CommitmentRecord DaStore::fetch_commitment(const Digest& reference) const {
    auto it = entries_.find(reference);
    if (it == entries_.end()) throw Error(Errc::unknown_reference, "unknown DA reference");
    return it->second.commitment;
}

void DaStore::tamper(const Digest& reference, size_t byte_index) {
    auto it = entries_.find(reference);
    if (it == entries_.end()) throw Error(Errc::unknown_reference, "unknown DA reference");
    if (it->second.block_bytes.empty())
        throw Error(Errc::data_unavailable, "nothing stored to tamper with");
    it->second.block_bytes[byte_index % it->second.block_bytes.size()] ^= 0x01;
}

Bytes DaStore::snapshot() const {
    ByteWriter w;
    for (const auto& ref : order_) {
        const Entry& e = entries_.at(ref);
        w.u8(uint8_t(e.mode));
        if (e.mode == DaMode::public_full) {
            w.bytes(e.block_bytes);
        } else {
            ByteWriter c;
            c.u64(e.commitment.block_no);
            put_digest(c, e.commitment.block_hash);
            put_digest(c, e.commitment.pre_root);
            put_digest(c, e.commitment.post_root);
            put_digest(c, e.commitment.transitions_root);
            w.bytes(c.take());
        }
    }
    return w.take();
}

DaStore DaStore::from_snapshot(const Bytes& snapshot) {
    DaStore store;
    ByteReader r(snapshot);
    while (!r.done()) {
        DaMode mode = DaMode(r.u8());
        Bytes payload = r.bytes();
        Entry e;
        e.mode = mode;
        if (mode == DaMode::public_full) {
            ByteReader br(payload);
            TraceBlock block = TraceBlock::deserialize(br);
            e.commitment = {block.block_no, block.block_hash, block.pre_root, block.post_root,
                            block.transitions_root};
            e.block_bytes = std::move(payload);
        } else {
            ByteReader br(payload);
            e.commitment.block_no = br.u64();
            e.commitment.block_hash = get_digest(br);
            e.commitment.pre_root = get_digest(br);
            e.commitment.post_root = get_digest(br);
            e.commitment.transitions_root = get_digest(br);
        }
        Digest ref = e.commitment.block_hash;
        if (!store.entries_.count(ref)) store.order_.push_back(ref);
        store.entries_[ref] = std::move(e);
    }
    return store;
}

}  // namespace chainless::da
