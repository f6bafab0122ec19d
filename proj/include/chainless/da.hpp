#pragma once

#include <map>
#include <string>

#include "chainless/fsm.hpp"

namespace chainless::da {

enum class DaMode : uint8_t { public_full = 0, private_commitment = 1 };

struct DaPolicy {
    DaMode mode = DaMode::public_full;
};

struct CommitmentRecord {
    uint64_t block_no = 0;
    Digest block_hash;
    Digest pre_root;
    Digest post_root;
    Digest transitions_root;
};

/// In-process data-availability store. Public mode keeps the full block;
/// private mode keeps only the commitment. Fetch re-hashes stored content —
/// tampering surfaces as Errc::digest_mismatch, never as silent data.
class DaStore {
public:
    /// Returns the DA reference (the block hash).
    Digest publish(const TraceBlock& block, DaPolicy policy);

    /// Full block; throws Errc::unknown_reference, Errc::data_unavailable
    /// (private mode), or Errc::digest_mismatch (stored bytes corrupt).
    TraceBlock fetch_block(const Digest& reference) const;

    /// Commitment-only record; available in both modes.
    CommitmentRecord fetch_commitment(const Digest& reference) const;

    /// Fault hook: flips one byte of the stored payload.
    void tamper(const Digest& reference, size_t byte_index);

    /// Append-only snapshot: length-prefixed records, replayable.
    Bytes snapshot() const;
    static DaStore from_snapshot(const Bytes& snapshot);

private:
    struct Entry {
        DaMode mode;
        Bytes block_bytes;  // public mode only
        CommitmentRecord commitment;
    };
    std::map<Digest, Entry> entries_;
    std::vector<Digest> order_;  // publication order, for the snapshot
};

}  // namespace chainless::da
