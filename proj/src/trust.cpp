#include "chainless/trust.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "chainless/rng.hpp"

namespace chainless::trust {

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::full_reexecution: return "full";
        case ModelKind::committee: return "committee";
        case ModelKind::optimistic: return "optimistic";
        case ModelKind::tee_spotcheck: return "spotcheck";
        case ModelKind::operator_trust: return "operator";
    }
    return "?";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::accepted: return "accepted";
        case Verdict::rejected: return "rejected";
        case Verdict::pending: return "pending";
    }
    return "?";
}

TrustModel TrustModel::committee(uint32_t n, uint32_t q, uint64_t stake) {
    if (q < 1 || q > n) throw Error(Errc::config, "committee requires 1 <= q <= n");
    TrustModel m;
    m.kind = ModelKind::committee;
    m.n = n;
    m.q = q;
    m.stake = stake;
    return m;
}

TrustModel TrustModel::optimistic(Tick window) {
    if (window < 1) throw Error(Errc::config, "optimistic window must be >= 1");
    TrustModel m;
    m.kind = ModelKind::optimistic;
    m.window = window;
    return m;
}

TrustModel TrustModel::spotcheck(double rate) {
    if (!(rate > 0.0 && rate <= 1.0)) throw Error(Errc::config, "sample_rate must be in (0,1]");
    TrustModel m;
    m.kind = ModelKind::tee_spotcheck;
    m.sample_rate = rate;
    return m;
}

std::optional<TrustModel> TrustModel::parse(std::string_view s) {
    try {
        if (s == "full") return full();
        if (s == "operator") return operator_trust();
        auto colon = s.find(':');
        if (colon == std::string_view::npos) return std::nullopt;
        std::string_view head = s.substr(0, colon);
        std::string args(s.substr(colon + 1));
        if (head == "committee") {
            auto comma = args.find(',');
            if (comma == std::string::npos) return std::nullopt;
            return committee(uint32_t(std::stoul(args.substr(0, comma))),
                             uint32_t(std::stoul(args.substr(comma + 1))));
        }
        if (head == "optimistic") return optimistic(std::stoull(args));
        if (head == "spotcheck") return spotcheck(std::stod(args));
    } catch (...) {
        return std::nullopt;
    }
    return std::nullopt;
}

std::string TrustModel::name() const {
    switch (kind) {
        case ModelKind::committee:
            return "committee:" + std::to_string(n) + "," + std::to_string(q);
        case ModelKind::optimistic: return "optimistic:" + std::to_string(window);
        case ModelKind::tee_spotcheck: {
            char buf[32];
            snprintf(buf, sizeof buf, "spotcheck:%g", sample_rate);
            return buf;
        }
        default: return model_kind_name(kind);
    }
}

std::string VerificationReceipt::export_line() const {
    std::string line = app_id;
    line += ' ';
    line += std::to_string(block_no);
    line += ' ';
    line += pre_root.hex();
    line += ' ';
    line += post_root.hex();
    line += ' ';
    line += trace_commitment.hex();
    line += ' ';
    line += model_kind_name(model);
    line += ' ';
    line += verdict_name(verdict);
    return line;
}

ReplayResult replay_block(const TraceBlock& block, const App& app, const AppStateView& pre_state) {
    ReplayResult r;
    r.claimed_post = block.post_root;

    if (block.transitions_root != merkle_root(transition_leaves(block.transitions))) {
        r.commitment_mismatch = true;
        return r;
    }

    Bytes state = pre_state.serialized_state;
    Digest cur = sha256(state);
    for (size_t i = 0; i < block.transitions.size(); ++i) {
        const TransitionRecord& t = block.transitions[i];
        Digest recomputed;
        bool diverged = false;
        if (t.seq_no != i || t.pre_state_root != cur) {
            diverged = true;
        }
        ApplyOutcome out = app.apply(state, t.input);
        ++r.replayed;
        if (!out.accepted) {
            // An input the app rejects produces no transition; its presence
            // in the trace is itself a divergence.
            r.divergent_seq = i;
            r.claimed_post = t.post_state_root;
            r.recomputed_post = cur;
            return r;
        }
        state = std::move(out.next_state);
        recomputed = sha256(state);
        if (diverged || t.post_state_root != recomputed) {
            r.divergent_seq = i;
            r.claimed_post = t.post_state_root;
            r.recomputed_post = recomputed;
            return r;
        }
        cur = recomputed;
    }
    if (cur != block.post_root) {
        r.divergent_seq = block.transitions.empty() ? 0 : block.transitions.size() - 1;
        r.claimed_post = block.post_root;
        r.recomputed_post = cur;
        return r;
    }
    r.ok = true;
    r.final_state = std::move(state);
    return r;
}

static VerificationReceipt base_receipt(const TraceBlock& block, const std::string& app_id,
                                        ModelKind model) {
    VerificationReceipt r;
    r.app_id = app_id;
    r.block_no = block.block_no;
    r.pre_root = block.pre_root;
    r.post_root = block.post_root;
    r.trace_commitment = block.block_hash;
    r.model = model;
    return r;
}

static Bytes seq_evidence(uint64_t seq) {
    ByteWriter w;
    w.u64(seq);
    return w.take();
}

VerificationReceipt verify_full(const TraceBlock& block, const App& app,
                                const AppStateView& pre_state) {
    if (pre_state.root() != block.pre_root)
        throw Error(Errc::pre_state_mismatch, "verify_full: pre-state root does not match block");
    VerificationReceipt r = base_receipt(block, pre_state.app_id, ModelKind::full_reexecution);
    ReplayResult replay = replay_block(block, app, pre_state);
    r.transitions_replayed = replay.replayed;
    if (replay.ok) {
        r.verdict = Verdict::accepted;
        r.evidence = Bytes(replay.recomputed_post.v.begin(), replay.recomputed_post.v.end());
    } else {
        r.verdict = Verdict::rejected;
        r.evidence = replay.commitment_mismatch ? to_bytes("transitions_root mismatch")
                                                : seq_evidence(replay.divergent_seq);
    }
    return r;
}

static Digest validator_sign(const Bytes& key, const Digest& block_hash, const Digest& root) {
    ByteWriter w;
    put_digest(w, block_hash);
    put_digest(w, root);
    Bytes b = w.take();
    Digest msg = sha256(b);
    return hmac_sha256(key, Bytes(msg.v.begin(), msg.v.end()));
}

VerificationReceipt verify_committee(const TraceBlock& block, const App& app,
                                     const AppStateView& pre_state,
                                     std::vector<ValidatorRecord>& validators, uint32_t q) {
    size_t active = 0;
    for (const auto& v : validators)
        if (!v.slashed) ++active;
    if (active < q)
        throw Error(Errc::insufficient_validators, "committee: fewer than q non-slashed validators");

    VerificationReceipt r = base_receipt(block, pre_state.app_id, ModelKind::committee);

    // Honest replay outcome; recomputed once, charged per honest validator.
    ReplayResult honest = replay_block(block, app, pre_state);
    Digest honest_root = honest.ok ? block.post_root : honest.recomputed_post;

    struct Vote {
        ValidatorRecord* who;
        Digest root;
        Digest sig;
        bool valid_block;  // honest validator also vetoes commitment mismatches
    };
    std::vector<Vote> votes;
    for (auto& v : validators) {
        if (v.slashed) continue;
        if (v.byzantine) {
            // Endorse the claimed root when it is wrong; on an honest block,
            // push a fabricated one.
            Digest target = block.post_root;
            if (honest.ok) target.v[0] ^= 0xff;
            votes.push_back({&v, target, validator_sign(v.key, block.block_hash, target), true});
        } else {
            r.transitions_replayed += honest.replayed;
            votes.push_back(
                {&v, honest_root, validator_sign(v.key, block.block_hash, honest_root), honest.ok});
        }
    }

    uint32_t quorum = 0;
    ByteWriter evidence;
    for (const auto& vote : votes) {
        if (vote.root == block.post_root && vote.valid_block) {
            ++quorum;
            if (quorum <= q) put_digest(evidence, vote.sig);
        }
    }
    r.verdict = quorum >= q ? Verdict::accepted : Verdict::rejected;
    r.evidence = evidence.take();

    // Slash anyone whose endorsement contradicts honest replay.
    for (auto& vote : votes) {
        bool lied = honest.ok ? vote.root != block.post_root : vote.root == block.post_root;
        if (lied) {
            vote.who->slashed = true;
            vote.who->stake = 0;
        }
    }
    return r;
}

std::optional<FraudProof> file_fraud_proof(const TraceBlock& block, const App& app,
                                           const AppStateView& pre_state) {
    ReplayResult replay = replay_block(block, app, pre_state);
    if (replay.ok) return std::nullopt;
    FraudProof proof;
    proof.block_no = block.block_no;
    if (replay.commitment_mismatch) {
        // The transitions root itself is broken; cite transition 0 with the
        // block-level roots as the divergence.
        proof.seq_no = 0;
        proof.claimed_post_root = block.post_root;
        proof.recomputed_post_root = Digest::zero();
        if (!block.transitions.empty())
            proof.witness = merkle_proof(transition_leaves(block.transitions), 0);
        return proof;
    }
    proof.seq_no = replay.divergent_seq;
    proof.claimed_post_root = replay.claimed_post;
    proof.recomputed_post_root = replay.recomputed_post;
    proof.witness = merkle_proof(transition_leaves(block.transitions), proof.seq_no);
    // Supply the state the referee needs to re-execute the disputed step:
    // replay the committed inputs up to (but not including) it.
    Bytes state = pre_state.serialized_state;
    for (uint64_t i = 0; i < proof.seq_no; ++i) {
        ApplyOutcome out = app.apply(state, block.transitions[i].input);
        if (!out.accepted) break;
        state = std::move(out.next_state);
    }
    proof.pre_state = std::move(state);
    return proof;
}

VerificationReceipt verify_tee_spotcheck(const BatchReceipt& receipt_in,
                                         const AttestationRegistry& registry, const App& app,
                                         const AppStateView& pre_state, double sample_rate,
                                         uint64_t rng_seed) {
    const TraceBlock& block = receipt_in.block;
    VerificationReceipt r = base_receipt(block, pre_state.app_id, ModelKind::tee_spotcheck);
    if (!(sample_rate > 0.0 && sample_rate <= 1.0))
        throw Error(Errc::config, "sample_rate must be in (0,1]");

    if (receipt_in.attestation.block_hash != block.block_hash ||
        !registry.verify(receipt_in.attestation)) {
        r.verdict = Verdict::rejected;
        r.evidence = to_bytes("invalid attestation");
        return r;
    }

    size_t m = block.transitions.size();
    if (m == 0) {
        r.verdict = Verdict::accepted;
        return r;
    }
    size_t k = size_t(std::ceil(sample_rate * double(m)));

    // Sample k distinct indices, seeded per (block_hash, rng_seed).
    ByteWriter sw;
    put_digest(sw, block.block_hash);
    sw.u64(rng_seed);
    Bytes sb = sw.take();
    Digest sd = sha256(sb);
    uint64_t seed = 0;
    for (int i = 0; i < 8; ++i) seed = seed << 8 | sd.v[size_t(i)];
    Rng rng(seed);
    std::vector<size_t> indices(m);
    for (size_t i = 0; i < m; ++i) indices[i] = i;
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + size_t(rng.below(uint64_t(m - i)));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(k);
    std::sort(indices.begin(), indices.end());
    std::vector<bool> sampled(m, false);
    for (size_t i : indices) sampled[i] = true;
    size_t max_index = indices.back();

    // Advance state sequentially up to the deepest sampled transition, but
    // compare recorded roots only at sampled positions.
    Bytes state = pre_state.serialized_state;
    Digest cur = sha256(state);
    for (size_t i = 0; i <= max_index; ++i) {
        const TransitionRecord& t = block.transitions[i];
        ApplyOutcome out = app.apply(state, t.input);
        ++r.transitions_replayed;
        if (!out.accepted) {
            r.verdict = Verdict::rejected;
            r.evidence = seq_evidence(i);
            return r;
        }
        state = std::move(out.next_state);
        Digest next = sha256(state);
        if (sampled[i] && (t.pre_state_root != cur || t.post_state_root != next)) {
            r.verdict = Verdict::rejected;
            r.evidence = seq_evidence(i);
            return r;
        }
        cur = next;
    }
    r.verdict = Verdict::accepted;
    return r;
}

VerificationReceipt operator_accept(const TraceBlock& block, const std::string& app_id) {
    VerificationReceipt r = base_receipt(block, app_id, ModelKind::operator_trust);
    r.verdict = Verdict::accepted;
    return r;
}

VerificationReceipt OptimisticTracker::open(const TraceBlock& block, const std::string& app_id,
                                            Tick now, Tick window) {
    if (window < 1) throw Error(Errc::config, "optimistic window must be >= 1");
    VerificationReceipt r = base_receipt(block, app_id, ModelKind::optimistic);
    r.verdict = Verdict::pending;
    r.pending_until = now + window;
    entries_[block.block_no] = Entry{block, r, false};
    return r;
}

bool OptimisticTracker::challenge(uint64_t block_no, const FraudProof& proof, Tick now,
                                  const App& app) {
    auto it = entries_.find(block_no);
    if (it == entries_.end() || it->second.settled) return false;
    Entry& e = it->second;
    if (now > e.receipt.pending_until) return false;  // window closed; ties favor the challenge
    const auto& transitions = e.block.transitions;
    if (proof.seq_no >= transitions.size()) return false;
    const TransitionRecord& tr = transitions[proof.seq_no];
    if (!verify_merkle_proof(e.block.transitions_root, tr.digest(), proof.witness)) return false;

    // A committed transition is fraudulent iff it breaks root chaining, the
    // block commitment disagrees with its last transition, or re-executing
    // the step from its claimed pre-state yields a different post-state.
    Digest expected_pre =
        proof.seq_no == 0 ? e.block.pre_root : transitions[proof.seq_no - 1].post_state_root;
    bool fraud = false;
    if (tr.seq_no != proof.seq_no || tr.pre_state_root != expected_pre) {
        fraud = true;
    } else if (proof.seq_no + 1 == transitions.size() &&
               tr.post_state_root != e.block.post_root) {
        fraud = true;
    } else {
        if (sha256(proof.pre_state) != tr.pre_state_root) return false;  // unusable evidence
        ApplyOutcome out = app.apply(proof.pre_state, tr.input);
        fraud = !out.accepted || sha256(out.next_state) != tr.post_state_root;
    }
    if (!fraud) return false;
    e.receipt.verdict = Verdict::rejected;
    e.receipt.evidence = to_bytes("fraud proof at seq " + std::to_string(proof.seq_no));
    e.settled = true;
    return true;
}

std::vector<VerificationReceipt> OptimisticTracker::finalize_due(Tick now) {
    std::vector<VerificationReceipt> out;
    for (auto& [no, e] : entries_) {
        if (e.settled) continue;
        if (now >= e.receipt.pending_until) {
            e.receipt.verdict = Verdict::accepted;
            e.settled = true;
            out.push_back(e.receipt);
        }
    }
    return out;
}

std::optional<VerificationReceipt> OptimisticTracker::receipt(uint64_t block_no) const {
    auto it = entries_.find(block_no);
    if (it == entries_.end()) return std::nullopt;
    return it->second.receipt;
}

}  // namespace chainless::trust
