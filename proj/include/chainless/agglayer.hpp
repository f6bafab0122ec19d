#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "chainless/merkle.hpp"
#include "chainless/trust.hpp"

namespace chainless::agg {

using ChainId = uint32_t;

enum class EventKind : uint8_t { deposit = 0, claim = 1, message = 2 };

const char* event_kind_name(EventKind k);

struct BridgeEvent {
    EventKind kind = EventKind::deposit;
    ChainId origin = 0;
    ChainId destination = 0;
    std::string token;
    uint64_t amount = 0;  // > 0 except for messages
    uint64_t nonce = 0;   // per-origin monotone
    Bytes payload;        // messages only

    Digest digest() const;
    std::string export_line() const;
};

/// Append-only per-chain exit tree; `root` always equals merkle_root(leaves).
struct LocalExitTree {
    ChainId chain = 0;
    std::vector<Digest> leaves;
    Digest root;

    void append(const Digest& leaf);
};

struct GlobalExitRoot {
    std::map<ChainId, Digest> roots;
    Digest ger;
    uint64_t epoch = 0;
};

/// Per-(origin chain, token) net bridge position: deposits in minus claims
/// out. The pessimistic invariant keeps every position >= 0.
class PessimisticLedger {
public:
    uint64_t position(ChainId chain, const std::string& token) const;
    void add(ChainId chain, const std::string& token, uint64_t amount);
    /// Throws Errc::pessimistic_violation rather than going negative.
    void sub(ChainId chain, const std::string& token, uint64_t amount);
    const std::map<std::pair<ChainId, std::string>, uint64_t>& positions() const {
        return positions_;
    }

private:
    std::map<std::pair<ChainId, std::string>, uint64_t> positions_;
};

struct PessimisticCheck {
    bool allow = false;
    std::string reason;
};

/// Pure: deny iff applying the proposed claim would drive the origin's net
/// position below zero.
PessimisticCheck pessimistic_check(const PessimisticLedger& ledger, const BridgeEvent& proposed);

struct AggregatedProof {
    uint64_t epoch = 0;
    std::vector<trust::VerificationReceipt> receipts;  // accepted only
    std::map<ChainId, Digest> bridge_roots;
    Digest aggregate_digest;

    static Digest compute_digest(uint64_t epoch,
                                 const std::vector<trust::VerificationReceipt>& receipts,
                                 const std::map<ChainId, Digest>& bridge_roots);
};

/// Builds an aggregate; throws Errc::non_accepted_receipt when any receipt
/// is pending or rejected.
AggregatedProof aggregate(std::vector<trust::VerificationReceipt> receipts,
                          std::map<ChainId, Digest> bridge_roots, uint64_t epoch);

/// Single owner of all bridge state: exit trees, the pessimistic ledger,
/// claim/message nonce tracking, and the anchored-root view claims verify
/// against.
class Agglayer {
public:
    explicit Agglayer(std::vector<ChainId> chains);

    BridgeEvent bridge_deposit(ChainId origin, ChainId destination, const std::string& token,
                               uint64_t amount);
    BridgeEvent send_message(ChainId origin, ChainId destination, Bytes payload);

    /// Verifies inclusion against the *anchored* origin root, rejects
    /// double claims, and enforces the pessimistic invariant. The credit is
    /// the caller's to apply on the destination.
    void bridge_claim(const BridgeEvent& event, const MerkleProof& inclusion);

    /// Fault hook: skips inclusion verification (a forged event) but still
    /// runs nonce and pessimistic checks — the exploit-blocking path.
    void bridge_claim_forged(const BridgeEvent& event);

    /// Delivery payload for a message event; exactly-once per (origin, nonce).
    Bytes route_message(const BridgeEvent& event, const MerkleProof& inclusion);

    /// Inclusion proof against the anchored prefix of the origin tree.
    /// Throws Errc::stale_or_invalid_proof when the event is not yet under
    /// an anchored root.
    MerkleProof prove_inclusion(const BridgeEvent& event) const;

    /// Recomputes the GER over the given per-chain roots (ascending
    /// ChainId); all registered chains must be present.
    GlobalExitRoot update_global_exit_root(const std::map<ChainId, Digest>& roots);

    /// Current per-chain roots; remembers leaf counts so these roots can be
    /// anchored later.
    std::map<ChainId, Digest> snapshot_roots();
    /// Marks previously snapshotted roots as settled; claims verify against
    /// them from now on.
    void anchor_roots(const std::map<ChainId, Digest>& roots);

    const LocalExitTree& exit_tree(ChainId chain) const;
    const PessimisticLedger& ledger() const { return ledger_; }
    const GlobalExitRoot& current_ger() const { return ger_; }
    bool claimed(ChainId origin, uint64_t nonce) const {
        return claimed_.count({origin, nonce}) > 0;
    }
    const std::vector<BridgeEvent>& event_log() const { return events_; }

private:
    LocalExitTree& tree(ChainId chain);
    BridgeEvent append_event(BridgeEvent e);

    std::map<ChainId, LocalExitTree> trees_;
    std::map<ChainId, uint64_t> next_nonce_;
    std::map<ChainId, std::vector<BridgeEvent>> per_origin_;  // index == leaf index
    std::map<ChainId, size_t> anchored_counts_;
    std::map<ChainId, Digest> anchored_roots_;
    std::map<ChainId, std::map<Digest, size_t>> root_counts_;  // snapshot bookkeeping
    std::set<std::pair<ChainId, uint64_t>> claimed_;
    std::set<std::pair<ChainId, uint64_t>> delivered_;
    PessimisticLedger ledger_;
    GlobalExitRoot ger_;
    std::vector<BridgeEvent> events_;
};

}  // namespace chainless::agg
