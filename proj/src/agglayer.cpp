#include "chainless/agglayer.hpp"

namespace chainless::agg {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::deposit: return "deposit";
        case EventKind::claim: return "claim";
        case EventKind::message: return "message";
    }
    return "?";
}

Digest BridgeEvent::digest() const {
    ByteWriter w;
    w.u8(uint8_t(kind));
    w.u32(origin);
    w.u32(destination);
    w.str(token);
    w.u64(amount);
    w.u64(nonce);
    w.bytes(payload);
    Bytes b = w.take();
    return sha256(b);
}

std::string BridgeEvent::export_line() const {
    std::string line = event_kind_name(kind);
    line += ' ';
    line += std::to_string(origin);
    line += ' ';
    line += std::to_string(destination);
    line += ' ';
    line += token.empty() ? "-" : token;
    line += ' ';
    line += std::to_string(amount);
    line += ' ';
    line += std::to_string(nonce);
    line += ' ';
    line += digest().hex();
    return line;
}

void LocalExitTree::append(const Digest& leaf) {
    leaves.push_back(leaf);
    root = merkle_root(leaves);
}

uint64_t PessimisticLedger::position(ChainId chain, const std::string& token) const {
    auto it = positions_.find({chain, token});
    return it == positions_.end() ? 0 : it->second;
}

void PessimisticLedger::add(ChainId chain, const std::string& token, uint64_t amount) {
    positions_[{chain, token}] += amount;
}

void PessimisticLedger::sub(ChainId chain, const std::string& token, uint64_t amount) {
    uint64_t& pos = positions_[{chain, token}];
    if (amount > pos)
        throw Error(Errc::pessimistic_violation,
                    "claim of " + std::to_string(amount) + " " + token + " exceeds chain " +
                        std::to_string(chain) + " net position " + std::to_string(pos));
    pos -= amount;
}

PessimisticCheck pessimistic_check(const PessimisticLedger& ledger, const BridgeEvent& proposed) {
    if (proposed.kind == EventKind::message) return {true, ""};
    uint64_t pos = ledger.position(proposed.origin, proposed.token);
    if (proposed.amount > pos)
        return {false, "position " + std::to_string(pos) + " < claim " +
                           std::to_string(proposed.amount)};
    return {true, ""};
}

Digest AggregatedProof::compute_digest(uint64_t epoch,
                                       const std::vector<trust::VerificationReceipt>& receipts,
                                       const std::map<ChainId, Digest>& bridge_roots) {
    ByteWriter w;
    w.u64(epoch);
    w.u32(uint32_t(receipts.size()));
    for (const auto& r : receipts) {
        w.str(r.app_id);
        w.u64(r.block_no);
        put_digest(w, r.pre_root);
        put_digest(w, r.post_root);
        put_digest(w, r.trace_commitment);
        w.u8(uint8_t(r.model));
        w.u8(uint8_t(r.verdict));
    }
    w.u32(uint32_t(bridge_roots.size()));
    for (const auto& [chain, root] : bridge_roots) {
        w.u32(chain);
        put_digest(w, root);
    }
    Bytes b = w.take();
    return sha256(b);
}

AggregatedProof aggregate(std::vector<trust::VerificationReceipt> receipts,
                          std::map<ChainId, Digest> bridge_roots, uint64_t epoch) {
    for (const auto& r : receipts)
        if (r.verdict != trust::Verdict::accepted)
            throw Error(Errc::non_accepted_receipt,
                        "aggregate: receipt for block " + std::to_string(r.block_no) + " is " +
                            trust::verdict_name(r.verdict));
    AggregatedProof agg;
    agg.epoch = epoch;
    agg.receipts = std::move(receipts);
    agg.bridge_roots = std::move(bridge_roots);
    agg.aggregate_digest = AggregatedProof::compute_digest(epoch, agg.receipts, agg.bridge_roots);
    return agg;
}

Agglayer::Agglayer(std::vector<ChainId> chains) {
    for (ChainId c : chains) {
        trees_[c].chain = c;
        next_nonce_[c] = 0;
    }
    ger_.epoch = 0;
}

LocalExitTree& Agglayer::tree(ChainId chain) {
    auto it = trees_.find(chain);
    if (it == trees_.end()) throw Error(Errc::missing_chain, "unknown chain " + std::to_string(chain));
    return it->second;
}

const LocalExitTree& Agglayer::exit_tree(ChainId chain) const {
    auto it = trees_.find(chain);
    if (it == trees_.end()) throw Error(Errc::missing_chain, "unknown chain " + std::to_string(chain));
    return it->second;
}

BridgeEvent Agglayer::append_event(BridgeEvent e) {
    e.nonce = next_nonce_.at(e.origin)++;
    tree(e.origin).append(e.digest());
    per_origin_[e.origin].push_back(e);
    events_.push_back(e);
    return e;
}

BridgeEvent Agglayer::bridge_deposit(ChainId origin, ChainId destination,
                                     const std::string& token, uint64_t amount) {
    if (amount == 0) throw Error(Errc::invalid_amount, "deposit amount must be positive");
    tree(origin);  // both ends must exist
    tree(destination);
    BridgeEvent e;
    e.kind = EventKind::deposit;
    e.origin = origin;
    e.destination = destination;
    e.token = token;
    e.amount = amount;
    e = append_event(std::move(e));
    ledger_.add(origin, token, amount);
    return e;
}

BridgeEvent Agglayer::send_message(ChainId origin, ChainId destination, Bytes payload) {
    tree(destination);
    BridgeEvent e;
    e.kind = EventKind::message;
    e.origin = origin;
    e.destination = destination;
    e.payload = std::move(payload);
    return append_event(std::move(e));
}

MerkleProof Agglayer::prove_inclusion(const BridgeEvent& event) const {
    auto anchored = anchored_counts_.find(event.origin);
    auto it = per_origin_.find(event.origin);
    if (it == per_origin_.end() || event.nonce >= it->second.size())
        throw Error(Errc::stale_or_invalid_proof, "event not in origin exit tree");
    size_t count = anchored == anchored_counts_.end() ? 0 : anchored->second;
    if (event.nonce >= count)
        throw Error(Errc::stale_or_invalid_proof,
                    "event not yet under an anchored exit root");
    std::vector<Digest> leaves;
    leaves.reserve(count);
    for (size_t i = 0; i < count; ++i) leaves.push_back(it->second[i].digest());
    return merkle_proof(leaves, event.nonce);
}

void Agglayer::bridge_claim(const BridgeEvent& event, const MerkleProof& inclusion) {
    if (event.kind != EventKind::deposit)
        throw Error(Errc::stale_or_invalid_proof, "only deposit events are claimable");
    if (event.amount == 0) throw Error(Errc::invalid_amount, "claim amount must be positive");
    if (claimed_.count({event.origin, event.nonce}))
        throw Error(Errc::double_claim, "event already claimed");
    auto anchored = anchored_roots_.find(event.origin);
    if (anchored == anchored_roots_.end())
        throw Error(Errc::stale_or_invalid_proof, "no anchored root for origin chain");
    if (!verify_merkle_proof(anchored->second, event.digest(), inclusion))
        throw Error(Errc::stale_or_invalid_proof,
                    "inclusion proof does not verify against anchored root");
    auto check = pessimistic_check(ledger_, event);
    if (!check.allow) throw Error(Errc::pessimistic_violation, check.reason);
    ledger_.sub(event.origin, event.token, event.amount);
    claimed_.insert({event.origin, event.nonce});
}

void Agglayer::bridge_claim_forged(const BridgeEvent& event) {
    if (claimed_.count({event.origin, event.nonce}))
        throw Error(Errc::double_claim, "event already claimed");
    auto check = pessimistic_check(ledger_, event);
    if (!check.allow) throw Error(Errc::pessimistic_violation, check.reason);
    ledger_.sub(event.origin, event.token, event.amount);
    claimed_.insert({event.origin, event.nonce});
}

Bytes Agglayer::route_message(const BridgeEvent& event, const MerkleProof& inclusion) {
    if (event.kind != EventKind::message)
        throw Error(Errc::stale_or_invalid_proof, "not a message event");
    if (delivered_.count({event.origin, event.nonce}))
        throw Error(Errc::duplicate_delivery, "message already delivered");
    auto anchored = anchored_roots_.find(event.origin);
    if (anchored == anchored_roots_.end())
        throw Error(Errc::stale_or_invalid_proof, "no anchored root for origin chain");
    if (!verify_merkle_proof(anchored->second, event.digest(), inclusion))
        throw Error(Errc::stale_or_invalid_proof,
                    "inclusion proof does not verify against anchored root");
    delivered_.insert({event.origin, event.nonce});
    return event.payload;
}

GlobalExitRoot Agglayer::update_global_exit_root(const std::map<ChainId, Digest>& roots) {
    for (const auto& [chain, t] : trees_)
        if (!roots.count(chain))
            throw Error(Errc::missing_chain,
                        "missing root for chain " + std::to_string(chain));
    std::vector<Digest> ordered;
    ordered.reserve(roots.size());
    for (const auto& [chain, root] : roots) ordered.push_back(root);  // map is ascending
    ger_.roots = roots;
    ger_.ger = merkle_root(ordered);
    ger_.epoch += 1;
    return ger_;
}

std::map<ChainId, Digest> Agglayer::snapshot_roots() {
    std::map<ChainId, Digest> out;
    for (const auto& [chain, t] : trees_) {
        out[chain] = t.root;
        root_counts_[chain][t.root] = t.leaves.size();
    }
    return out;
}

void Agglayer::anchor_roots(const std::map<ChainId, Digest>& roots) {
    for (const auto& [chain, root] : roots) {
        auto by_chain = root_counts_.find(chain);
        if (by_chain == root_counts_.end()) continue;
        auto it = by_chain->second.find(root);
        if (it == by_chain->second.end()) continue;
        anchored_roots_[chain] = root;
        anchored_counts_[chain] = it->second;
    }
}

}  // namespace chainless::agg
