#include "chainless/fsm.hpp"

namespace chainless {

Digest TransitionRecord::digest() const {
    ByteWriter w;
    w.u64(seq_no);
    w.u64(input.size());
    w.raw(input);
    put_digest(w, pre_state_root);
    put_digest(w, post_state_root);
    Bytes b = w.take();
    return sha256(b);
}

Digest TraceBlock::compute_hash() const {
    ByteWriter w;
    put_digest(w, prev_block_hash);
    w.u64(block_no);
    put_digest(w, transitions_root);
    put_digest(w, pre_root);
    put_digest(w, post_root);
    Bytes b = w.take();
    return sha256(b);
}

Bytes TraceBlock::serialize() const {
    ByteWriter w;
    w.u64(block_no);
    w.u32(uint32_t(transitions.size()));
    for (const auto& t : transitions) {
        w.u64(t.seq_no);
        w.bytes(t.input);
        put_digest(w, t.pre_state_root);
        put_digest(w, t.post_state_root);
    }
    put_digest(w, transitions_root);
    put_digest(w, prev_block_hash);
    put_digest(w, block_hash);
    put_digest(w, pre_root);
    put_digest(w, post_root);
    w.u64(sealed_at);
    return w.take();
}

TraceBlock TraceBlock::deserialize(ByteReader& r) {
    TraceBlock b;
    b.block_no = r.u64();
    uint32_t n = r.u32();
    b.transitions.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        TransitionRecord t;
        t.seq_no = r.u64();
        t.input = r.bytes();
        t.pre_state_root = get_digest(r);
        t.post_state_root = get_digest(r);
        b.transitions.push_back(std::move(t));
    }
    b.transitions_root = get_digest(r);
    b.prev_block_hash = get_digest(r);
    b.block_hash = get_digest(r);
    b.pre_root = get_digest(r);
    b.post_root = get_digest(r);
    b.sealed_at = r.u64();
    return b;
}

std::vector<Digest> transition_leaves(const std::vector<TransitionRecord>& ts) {
    std::vector<Digest> leaves;
    leaves.reserve(ts.size());
    for (const auto& t : ts) leaves.push_back(t.digest());
    return leaves;
}

std::pair<AppStateView, TransitionRecord> apply_transition(const App& app,
                                                           const AppStateView& state,
                                                           const Bytes& input) {
    ApplyOutcome out = app.apply(state.serialized_state, input);
    if (!out.accepted) throw Error(Errc::rejected_input, "input rejected: " + out.reject_reason);
    AppStateView next = state;
    next.serialized_state = std::move(out.next_state);
    TransitionRecord rec;
    rec.input = input;
    rec.pre_state_root = state.root();
    rec.post_state_root = next.root();
    return {std::move(next), std::move(rec)};
}

TraceBlock chain_extend(const std::optional<TraceBlock>& prev,
                        std::vector<TransitionRecord> transitions, Tick now) {
    if (transitions.empty()) throw Error(Errc::continuity, "chain_extend: no transitions");
    if (prev && transitions.front().pre_state_root != prev->post_root)
        throw Error(Errc::continuity, "chain_extend: pre_root does not chain to previous block");
    for (size_t i = 0; i + 1 < transitions.size(); ++i)
        if (transitions[i].post_state_root != transitions[i + 1].pre_state_root)
            throw Error(Errc::continuity, "chain_extend: transitions do not chain internally");

    TraceBlock b;
    b.block_no = prev ? prev->block_no + 1 : 0;
    b.prev_block_hash = prev ? prev->block_hash : Digest::zero();
    b.pre_root = transitions.front().pre_state_root;
    b.post_root = transitions.back().post_state_root;
    for (size_t i = 0; i < transitions.size(); ++i) transitions[i].seq_no = i;
    b.transitions = std::move(transitions);
    b.transitions_root = merkle_root(transition_leaves(b.transitions));
    b.sealed_at = now;
    b.block_hash = b.compute_hash();
    return b;
}

}  // namespace chainless
