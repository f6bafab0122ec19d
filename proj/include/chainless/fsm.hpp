#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chainless/digest.hpp"
#include "chainless/merkle.hpp"

namespace chainless {

using Tick = uint64_t;

/// Snapshot of an application's full off-chain state. `serialized_state` is
/// the canonical encoding: serializing the same logical state twice yields
/// byte-identical output, and the state root is its SHA-256.
struct AppStateView {
    std::string app_id;
    Bytes serialized_state;
    uint64_t version = 0;

    Digest root() const { return sha256(serialized_state); }
};

struct ApplyOutcome {
    bool accepted = false;
    Bytes next_state;        // valid when accepted
    std::string reject_reason;  // valid when rejected

    static ApplyOutcome ok(Bytes s) { return {true, std::move(s), {}}; }
    static ApplyOutcome reject(std::string why) { return {false, {}, std::move(why)}; }
};

/// Deterministic transition function: next state depends only on (state,
/// input). Implementations must be pure; all of them are invoked from replay
/// verifiers as well as the live sequencer.
class App {
public:
    virtual ~App() = default;
    virtual std::string kind() const = 0;
    virtual ApplyOutcome apply(const Bytes& state, const Bytes& input) const = 0;
};

struct TransitionRecord {
    uint64_t seq_no = 0;  // 0-based within its block
    Bytes input;
    Digest pre_state_root;
    Digest post_state_root;

    /// H(seq_no ‖ len(input) ‖ input ‖ pre ‖ post), integers big-endian u64.
    Digest digest() const;
};

struct TraceBlock {
    uint64_t block_no = 0;
    std::vector<TransitionRecord> transitions;
    Digest transitions_root;
    Digest prev_block_hash;
    Digest block_hash;
    Digest pre_root;
    Digest post_root;
    Tick sealed_at = 0;

    /// H(prev_block_hash ‖ block_no ‖ transitions_root ‖ pre_root ‖ post_root)
    Digest compute_hash() const;

    Bytes serialize() const;
    static TraceBlock deserialize(ByteReader& r);
};

struct Checkpoint {
    uint64_t block_no = 0;
    Digest state_root;
    Digest trace_head;
    Tick created_at = 0;
};

std::vector<Digest> transition_leaves(const std::vector<TransitionRecord>& ts);

/// Applies one input. Throws Errc::rejected_input when the app rejects; the
/// caller's state is untouched in that case.
std::pair<AppStateView, TransitionRecord> apply_transition(const App& app,
                                                           const AppStateView& state,
                                                           const Bytes& input);

/// Seals `transitions` into the block following `prev` (nullopt = genesis).
/// Throws Errc::continuity when the first pre_state_root does not chain.
TraceBlock chain_extend(const std::optional<TraceBlock>& prev,
                        std::vector<TransitionRecord> transitions, Tick now);

}  // namespace chainless
