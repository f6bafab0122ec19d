#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainless/sequencer.hpp"

namespace chainless::trust {

enum class ModelKind : uint8_t {
    full_reexecution = 0,
    committee,
    optimistic,
    tee_spotcheck,
    operator_trust,
};

const char* model_kind_name(ModelKind k);

/// Verification strategy plus its parameters. Parse accepts "full",
/// "committee:n,q", "optimistic:window", "spotcheck:rate", "operator".
struct TrustModel {
    ModelKind kind = ModelKind::full_reexecution;
    uint32_t n = 0;          // committee
    uint32_t q = 0;          // committee
    uint64_t stake = 100;    // committee, units per validator
    Tick window = 0;         // optimistic
    double sample_rate = 0;  // tee_spotcheck, in (0,1]

    static TrustModel full() { return {ModelKind::full_reexecution}; }
    static TrustModel committee(uint32_t n, uint32_t q, uint64_t stake = 100);
    static TrustModel optimistic(Tick window);
    static TrustModel spotcheck(double rate);
    static TrustModel operator_trust() { return {ModelKind::operator_trust}; }
    static std::optional<TrustModel> parse(std::string_view s);
    std::string name() const;
};

enum class Verdict : uint8_t { accepted = 0, rejected = 1, pending = 2 };

const char* verdict_name(Verdict v);

struct VerificationReceipt {
    std::string app_id;
    uint64_t block_no = 0;
    Digest pre_root;
    Digest post_root;
    Digest trace_commitment;  // block_hash
    ModelKind model = ModelKind::full_reexecution;
    Verdict verdict = Verdict::rejected;
    Tick pending_until = 0;  // meaningful when verdict == pending
    Bytes evidence;          // quorum signatures, divergence seq, or empty
    uint64_t transitions_replayed = 0;

    /// Line-delimited export record for the harness report.
    std::string export_line() const;
};

struct FraudProof {
    uint64_t block_no = 0;
    uint64_t seq_no = 0;  // first divergent transition
    Digest claimed_post_root;
    Digest recomputed_post_root;
    MerkleProof witness;  // inclusion of the transition under transitions_root
    Bytes pre_state;      // serialized state before the disputed transition
};

struct ValidatorRecord {
    std::string validator_id;
    uint64_t stake = 100;
    bool slashed = false;
    Bytes key;
    bool byzantine = false;  // fault hook: endorses the block's claimed root
};

/// Deterministic replay of one block; the shared soundness kernel.
struct ReplayResult {
    bool ok = false;
    uint64_t divergent_seq = 0;  // valid when !ok
    Digest claimed_post;
    Digest recomputed_post;
    bool commitment_mismatch = false;  // transitions_root failed recomputation
    uint64_t replayed = 0;
    Bytes final_state;
};

ReplayResult replay_block(const TraceBlock& block, const App& app, const AppStateView& pre_state);

/// zkVM stand-in: full deterministic replay. Throws Errc::pre_state_mismatch
/// when root(pre_state) != block.pre_root.
VerificationReceipt verify_full(const TraceBlock& block, const App& app,
                                const AppStateView& pre_state);

/// Each non-slashed honest validator replays independently; byzantine ones
/// endorse a root without replaying. Accepted iff >= q signatures back the
/// block's claimed (block_hash, post_root). Validators whose signed root
/// differs from honest replay are slashed (stake zeroed, excluded from later
/// quorums). Throws Errc::insufficient_validators.
VerificationReceipt verify_committee(const TraceBlock& block, const App& app,
                                     const AppStateView& pre_state,
                                     std::vector<ValidatorRecord>& validators, uint32_t q);

/// Replay that stops at the first divergence and packages it with a Merkle
/// witness; returns nothing for honest blocks.
std::optional<FraudProof> file_fraud_proof(const TraceBlock& block, const App& app,
                                           const AppStateView& pre_state);

/// Attestation check first, then replay of a seeded pseudo-random sample of
/// ceil(sample_rate * m) transitions, each checked pre -> post against the
/// recorded roots. The sample is drawn per (block_hash, rng_seed).
VerificationReceipt verify_tee_spotcheck(const BatchReceipt& receipt_in,
                                         const AttestationRegistry& registry, const App& app,
                                         const AppStateView& pre_state, double sample_rate,
                                         uint64_t rng_seed);

/// Always accepts; the model tag is the only safeguard.
VerificationReceipt operator_accept(const TraceBlock& block, const std::string& app_id);

/// Challenge-window bookkeeping for optimistic verification. Challenges are
/// evaluated at the tick they are filed; a valid challenge at the expiry
/// tick still wins, provided it is filed before finalize_due runs.
class OptimisticTracker {
public:
    /// Opens a pending receipt for the block.
    VerificationReceipt open(const TraceBlock& block, const std::string& app_id, Tick now,
                             Tick window);

    /// Referees the proof: the witness must verify against the block's
    /// transitions_root, and the fraud must be demonstrable either
    /// structurally (broken root chaining, commitment mismatch) or by
    /// re-executing the single disputed transition from the supplied
    /// pre-state. Returns true iff the window is still open and the fraud is
    /// real; the receipt flips to rejected.
    bool challenge(uint64_t block_no, const FraudProof& proof, Tick now, const App& app);

    /// Upgrades unchallenged receipts whose window expired to accepted.
    std::vector<VerificationReceipt> finalize_due(Tick now);

    std::optional<VerificationReceipt> receipt(uint64_t block_no) const;

private:
    struct Entry {
        TraceBlock block;
        VerificationReceipt receipt;
        bool settled = false;
    };
    std::map<uint64_t, Entry> entries_;
};

}  // namespace chainless::trust
