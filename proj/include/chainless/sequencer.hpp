#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chainless/fsm.hpp"

namespace chainless {

enum class FaultMode : uint8_t {
    honest = 0,
    corrupt_post_root,
    reorder_against_policy,
    drop_transitions,
    forge_attestation,
};

const char* fault_mode_name(FaultMode m);
std::optional<FaultMode> fault_mode_from_name(std::string_view s);

/// Byzantine hook: when `mode != honest`, the block numbered `trigger_block`
/// is published corrupted while the sequencer's internal state keeps
/// advancing honestly — the valid-looking-attestation adversary.
struct FaultPolicy {
    FaultMode mode = FaultMode::honest;
    uint64_t trigger_block = 0;
};

struct SequencerConfig {
    uint64_t mu = 1;  // max transitions per block
    uint64_t nu = 1;  // max block age in ticks before sealing
    std::string app_id;
    Bytes genesis_state;
    Bytes attestation_key;
    std::string enclave_id;
};

struct AttestationStub {
    std::string enclave_id;
    Digest block_hash;
    Digest signature;  // HMAC-SHA-256 over H(enclave_id ‖ block_hash)
};

struct BatchReceipt {
    TraceBlock block;
    AttestationStub attestation;
    std::optional<Checkpoint> checkpoint;
};

/// Simulation-wide registry standing in for enclave remote attestation.
class AttestationRegistry {
public:
    void register_enclave(const std::string& enclave_id, Bytes key);
    bool verify(const AttestationStub& att) const;
    static Digest message(const std::string& enclave_id, const Digest& block_hash);
    static Digest sign(const Bytes& key, const std::string& enclave_id, const Digest& block_hash);

private:
    std::map<std::string, Bytes> keys_;
};

/// The Execution Layer: orders inputs by (arrival tick, submission order),
/// applies the FSM, and seals blocks whenever μ transitions are pending or
/// the open block is ν ticks old, whichever comes first. Empty blocks are
/// never sealed.
class Sequencer {
public:
    struct Rejection {
        Tick tick = 0;
        Bytes input;
        std::string reason;
    };

    Sequencer(std::shared_ptr<const App> app, SequencerConfig cfg, FaultPolicy fault = {});

    /// Enqueues an input. Returns the admission number; the definitive
    /// global sequence number is fixed by the ordering rule when the input
    /// is drained (see assigned_seq). Throws Errc::queue_closed after
    /// shutdown.
    uint64_t submit(Bytes input, Tick arrival);

    /// Drains all inputs with arrival ≤ now in (tick, submission) order,
    /// sealing along the way per the μ rule, then applies the ν rule.
    std::vector<BatchReceipt> step(Tick now);

    /// The ν/μ check alone, without draining.
    std::optional<BatchReceipt> seal_if_due(Tick now);

    /// Re-attests one of our sealed blocks; throws Errc::unknown_block for
    /// anything else. Honors forge_attestation.
    AttestationStub attest(const TraceBlock& block) const;

    void shutdown() { closed_ = true; }

    /// Scheduled fault injection: replaces the fault policy mid-run.
    void set_fault(FaultPolicy fault) { fault_ = fault; }

    const AppStateView& state() const { return state_; }
    const SequencerConfig& config() const { return cfg_; }
    uint64_t executed_count() const { return next_global_seq_; }
    const std::vector<Rejection>& rejections() const { return rejections_; }

    /// Global execution-order number for an admission, once drained.
    std::optional<uint64_t> assigned_seq(uint64_t admission_no) const;

    /// Honest pre-state snapshot for a sealed block (the replay oracle used
    /// by verifiers in this simulation).
    const Bytes& honest_pre_state(uint64_t block_no) const;
    Digest honest_post_root(uint64_t block_no) const;

    const std::vector<BatchReceipt>& sealed() const { return sealed_; }

private:
    BatchReceipt seal(Tick now);
    void apply_one(const Bytes& input, Tick arrival);

    std::shared_ptr<const App> app_;
    SequencerConfig cfg_;
    FaultPolicy fault_;
    AppStateView state_;
    Digest state_root_;  // cached root of state_.serialized_state
    bool closed_ = false;

    // (arrival, admission) -> input; drained in key order
    std::map<std::pair<Tick, uint64_t>, Bytes> queue_;
    uint64_t next_admission_ = 0;
    uint64_t next_global_seq_ = 0;
    std::map<uint64_t, uint64_t> admission_to_seq_;

    std::vector<TransitionRecord> pending_;
    Bytes pending_pre_state_;  // state before pending_.front()
    Tick open_tick_ = 0;
    bool block_open_ = false;

    std::optional<TraceBlock> last_block_;
    uint64_t next_block_no_ = 0;
    std::vector<BatchReceipt> sealed_;
    struct Snapshot {
        Bytes pre_state;
        Digest honest_post;
    };
    std::map<uint64_t, Snapshot> snapshots_;
    std::vector<Rejection> rejections_;
};

struct ScheduleEntry {
    Tick tick = 0;
    std::string app_id;
    Bytes input;
};

/// Scripted schedule: one record per line — "tick app_id base64payload".
/// Blank lines and '#' comments allowed. Throws Errc::config with a line
/// number on malformed records.
std::vector<ScheduleEntry> parse_input_schedule(const std::string& text);

}  // namespace chainless
