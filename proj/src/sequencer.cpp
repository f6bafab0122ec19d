#include "chainless/sequencer.hpp"

#include <sstream>

namespace chainless {

const char* fault_mode_name(FaultMode m) {
    switch (m) {
        case FaultMode::honest: return "honest";
        case FaultMode::corrupt_post_root: return "corrupt_post_root";
        case FaultMode::reorder_against_policy: return "reorder_against_policy";
        case FaultMode::drop_transitions: return "drop_transitions";
        case FaultMode::forge_attestation: return "forge_attestation";
    }
    return "?";
}

std::optional<FaultMode> fault_mode_from_name(std::string_view s) {
    for (auto m : {FaultMode::honest, FaultMode::corrupt_post_root,
                   FaultMode::reorder_against_policy, FaultMode::drop_transitions,
                   FaultMode::forge_attestation})
        if (s == fault_mode_name(m)) return m;
    return std::nullopt;
}

void AttestationRegistry::register_enclave(const std::string& enclave_id, Bytes key) {
    keys_[enclave_id] = std::move(key);
}

Digest AttestationRegistry::message(const std::string& enclave_id, const Digest& block_hash) {
    ByteWriter w;
    w.str(enclave_id);
    put_digest(w, block_hash);
    Bytes b = w.take();
    return sha256(b);
}

Digest AttestationRegistry::sign(const Bytes& key, const std::string& enclave_id,
                                 const Digest& block_hash) {
    Digest msg = message(enclave_id, block_hash);
    return hmac_sha256(key, Bytes(msg.v.begin(), msg.v.end()));
}

bool AttestationRegistry::verify(const AttestationStub& att) const {
    auto it = keys_.find(att.enclave_id);
    if (it == keys_.end()) return false;
    return sign(it->second, att.enclave_id, att.block_hash) == att.signature;
}

Sequencer::Sequencer(std::shared_ptr<const App> app, SequencerConfig cfg, FaultPolicy fault)
    : app_(std::move(app)), cfg_(std::move(cfg)), fault_(fault) {
    if (cfg_.mu < 1 || cfg_.nu < 1) throw Error(Errc::config, "mu and nu must be >= 1");
    state_.app_id = cfg_.app_id;
    state_.serialized_state = cfg_.genesis_state;
    state_.version = 0;
    state_root_ = state_.root();
}

uint64_t Sequencer::submit(Bytes input, Tick arrival) {
    if (closed_) throw Error(Errc::queue_closed, "sequencer is shut down");
    uint64_t admission = next_admission_++;
    queue_.emplace(std::make_pair(arrival, admission), std::move(input));
    return admission;
}

std::optional<uint64_t> Sequencer::assigned_seq(uint64_t admission_no) const {
    auto it = admission_to_seq_.find(admission_no);
    if (it == admission_to_seq_.end()) return std::nullopt;
    return it->second;
}

void Sequencer::apply_one(const Bytes& input, Tick arrival) {
    ApplyOutcome out = app_->apply(state_.serialized_state, input);
    if (!out.accepted) {
        rejections_.push_back({arrival, input, out.reject_reason});
        return;
    }
    if (!block_open_) {
        pending_pre_state_ = state_.serialized_state;
        open_tick_ = arrival;
        block_open_ = true;
    }
    TransitionRecord rec;
    rec.input = input;
    rec.pre_state_root = state_root_;
    state_.serialized_state = std::move(out.next_state);
    state_root_ = state_.root();
    rec.post_state_root = state_root_;
    pending_.push_back(std::move(rec));
}

std::vector<BatchReceipt> Sequencer::step(Tick now) {
    std::vector<BatchReceipt> out;
    auto end = queue_.upper_bound(std::make_pair(now, UINT64_MAX));
    for (auto it = queue_.begin(); it != end;) {
        admission_to_seq_[it->first.second] = next_global_seq_++;
        apply_one(it->second, it->first.first);
        it = queue_.erase(it);
        if (pending_.size() >= cfg_.mu) out.push_back(seal(now));
    }
    if (auto r = seal_if_due(now)) out.push_back(std::move(*r));
    return out;
}

std::optional<BatchReceipt> Sequencer::seal_if_due(Tick now) {
    if (pending_.empty()) return std::nullopt;
    if (pending_.size() >= cfg_.mu || now - open_tick_ >= cfg_.nu) return seal(now);
    return std::nullopt;
}

BatchReceipt Sequencer::seal(Tick now) {
    std::vector<TransitionRecord> transitions = std::move(pending_);
    pending_.clear();
    block_open_ = false;

    Digest honest_post = transitions.back().post_state_root;
    Bytes pre_state = std::move(pending_pre_state_);
    uint64_t block_no = next_block_no_;
    bool faulted = fault_.mode != FaultMode::honest && fault_.trigger_block == block_no;

    if (faulted && fault_.mode == FaultMode::corrupt_post_root)
        transitions.back().post_state_root.v[0] ^= 0x01;
    if (faulted && fault_.mode == FaultMode::reorder_against_policy && transitions.size() >= 2)
        std::swap(transitions[0], transitions[1]);
    if (faulted && fault_.mode == FaultMode::drop_transitions && transitions.size() >= 2)
        transitions.erase(transitions.begin());

    // Built by hand rather than via chain_extend: a faulty trace does not
    // chain, and the published block must still carry self-consistent
    // commitments.
    TraceBlock b;
    b.block_no = block_no;
    b.prev_block_hash = last_block_ ? last_block_->block_hash : Digest::zero();
    b.pre_root = sha256(pre_state);
    b.post_root = fault_.mode == FaultMode::corrupt_post_root && faulted
                      ? transitions.back().post_state_root
                      : honest_post;
    for (size_t i = 0; i < transitions.size(); ++i) transitions[i].seq_no = i;
    b.transitions = std::move(transitions);
    b.transitions_root = merkle_root(transition_leaves(b.transitions));
    b.sealed_at = now;
    b.block_hash = b.compute_hash();

    state_.version += 1;
    last_block_ = b;
    next_block_no_ = block_no + 1;
    snapshots_[block_no] = {std::move(pre_state), honest_post};

    BatchReceipt receipt;
    receipt.attestation = attest(b);
    receipt.checkpoint = Checkpoint{block_no, b.post_root, b.block_hash, now};
    receipt.block = std::move(b);
    sealed_.push_back(receipt);
    return receipt;
}

AttestationStub Sequencer::attest(const TraceBlock& block) const {
    bool known = (last_block_ && last_block_->block_hash == block.block_hash);
    if (!known)
        for (const auto& r : sealed_)
            if (r.block.block_hash == block.block_hash) known = true;
    if (!known) throw Error(Errc::unknown_block, "attest: block was not sealed by this sequencer");

    AttestationStub att;
    att.enclave_id = cfg_.enclave_id;
    att.block_hash = block.block_hash;
    att.signature = AttestationRegistry::sign(cfg_.attestation_key, att.enclave_id, block.block_hash);
    if (fault_.mode == FaultMode::forge_attestation && fault_.trigger_block == block.block_no)
        att.signature.v[0] ^= 0x01;
    return att;
}

const Bytes& Sequencer::honest_pre_state(uint64_t block_no) const {
    auto it = snapshots_.find(block_no);
    if (it == snapshots_.end()) throw Error(Errc::unknown_block, "no snapshot for block");
    return it->second.pre_state;
}

Digest Sequencer::honest_post_root(uint64_t block_no) const {
    auto it = snapshots_.find(block_no);
    if (it == snapshots_.end()) throw Error(Errc::unknown_block, "no snapshot for block");
    return it->second.honest_post;
}

std::vector<ScheduleEntry> parse_input_schedule(const std::string& text) {
    std::vector<ScheduleEntry> out;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream ls(line);
        ScheduleEntry e;
        std::string b64;
        if (!(ls >> e.tick >> e.app_id >> b64))
            throw Error(Errc::config,
                        "schedule line " + std::to_string(line_no) + ": expected 'tick app_id base64'");
        auto payload = base64_decode(b64);
        if (!payload)
            throw Error(Errc::config, "schedule line " + std::to_string(line_no) + ": bad base64");
        e.input = std::move(*payload);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace chainless
