#include "doctest.h"

#include <algorithm>

#include "chainless/counter_app.hpp"
#include "chainless/rng.hpp"
#include "chainless/sequencer.hpp"

using namespace chainless;

namespace {

SequencerConfig counter_config(uint64_t mu, uint64_t nu) {
    SequencerConfig cfg;
    cfg.mu = mu;
    cfg.nu = nu;
    cfg.app_id = "counter";
    cfg.genesis_state = CounterApp::encode_state(0);
    cfg.attestation_key = to_bytes("key-counter");
    cfg.enclave_id = "enclave-counter";
    return cfg;
}

Sequencer make_seq(uint64_t mu, uint64_t nu, FaultPolicy fault = {}) {
    return Sequencer(std::make_shared<CounterApp>(), counter_config(mu, nu), fault);
}

AttestationRegistry registry_for(const SequencerConfig& cfg) {
    AttestationRegistry reg;
    reg.register_enclave(cfg.enclave_id, cfg.attestation_key);
    return reg;
}

}  // namespace

TEST_CASE("inputs execute in (tick, submission) order") {
    auto seq = make_seq(10, 100);
    uint64_t late = seq.submit(to_bytes("+1"), 3);
    uint64_t early = seq.submit(to_bytes("+2"), 1);
    seq.step(5);
    CHECK(seq.assigned_seq(early) == 0);
    CHECK(seq.assigned_seq(late) == 1);

    // same tick: submission order
    uint64_t a = seq.submit(to_bytes("+1"), 7);
    uint64_t b = seq.submit(to_bytes("+1"), 7);
    seq.step(7);
    CHECK(*seq.assigned_seq(a) < *seq.assigned_seq(b));
}

TEST_CASE("100 random arrivals get the sort-rank permutation") {
    auto seq = make_seq(1000, 1000);
    Rng rng(5);
    std::vector<std::pair<Tick, uint64_t>> submitted;  // (tick, admission)
    for (int i = 0; i < 100; ++i) {
        Tick t = rng.below(20);
        submitted.push_back({t, seq.submit(to_bytes("+1"), t)});
    }
    seq.step(50);
    // sort oracle: stable sort by tick
    std::vector<size_t> order(submitted.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return submitted[a].first < submitted[b].first; });
    std::vector<bool> seen(100, false);
    for (size_t rank = 0; rank < order.size(); ++rank) {
        auto assigned = seq.assigned_seq(submitted[order[rank]].second);
        REQUIRE(assigned.has_value());
        CHECK(*assigned == rank);
        seen[*assigned] = true;
    }
    CHECK(std::count(seen.begin(), seen.end(), true) == 100);
}

TEST_CASE("mu trigger seals exactly at mu transitions") {
    auto seq = make_seq(3, 100);
    for (int i = 0; i < 3; ++i) seq.submit(to_bytes("+1"), 0);
    auto receipts = seq.step(0);
    REQUIRE(receipts.size() == 1);
    CHECK(receipts[0].block.transitions.size() == 3);
    CHECK(receipts[0].block.block_no == 0);
    CHECK(receipts[0].block.prev_block_hash == Digest::zero());
}

TEST_CASE("nu trigger seals a partial block; empty blocks never seal") {
    auto seq = make_seq(10, 5);
    seq.submit(to_bytes("+1"), 0);
    CHECK(seq.step(0).empty());
    CHECK(seq.step(4).empty());
    auto receipts = seq.step(5);  // now - open_tick == nu
    REQUIRE(receipts.size() == 1);
    CHECK(receipts[0].block.transitions.size() == 1);

    // nothing pending: no seal no matter how late
    CHECK(seq.step(99).empty());
}

TEST_CASE("no block exceeds mu; multiple seals within one tick") {
    auto seq = make_seq(2, 100);
    for (int i = 0; i < 5; ++i) seq.submit(to_bytes("+1"), 1);
    auto receipts = seq.step(1);
    REQUIRE(receipts.size() == 2);
    for (const auto& r : receipts) CHECK(r.block.transitions.size() <= 2);
    CHECK(seq.step(101).size() == 1);  // the leftover transition via nu
}

TEST_CASE("attestation binds to exactly one block") {
    auto seq = make_seq(1, 1);
    auto reg = registry_for(seq.config());
    seq.submit(to_bytes("+1"), 0);
    seq.submit(to_bytes("+2"), 1);
    auto r0 = seq.step(0);
    auto r1 = seq.step(1);
    REQUIRE(r0.size() == 1);
    REQUIRE(r1.size() == 1);
    CHECK(reg.verify(r0[0].attestation));
    CHECK(reg.verify(r1[0].attestation));

    AttestationStub crossed = r0[0].attestation;
    crossed.block_hash = r1[0].block.block_hash;
    CHECK_FALSE(reg.verify(crossed));

    TraceBlock foreign;
    foreign.block_hash = sha256(to_bytes("not ours"));
    CHECK_THROWS_AS((void)seq.attest(foreign), Error);
}

TEST_CASE("rejected inputs go to the side channel, not the trace") {
    auto seq = make_seq(10, 1);
    seq.submit(to_bytes("-5"), 0);  // underflow
    seq.submit(to_bytes("+1"), 0);
    auto receipts = seq.step(1);
    REQUIRE(receipts.size() == 1);
    CHECK(receipts[0].block.transitions.size() == 1);
    REQUIRE(seq.rejections().size() == 1);
    CHECK(seq.rejections()[0].reason == "counter underflow");
}

TEST_CASE("queue closes on shutdown") {
    auto seq = make_seq(1, 1);
    seq.shutdown();
    CHECK_THROWS_AS((void)seq.submit(to_bytes("+1"), 0), Error);
}

TEST_CASE("honest runs are byte-for-byte reproducible") {
    auto run = [] {
        auto seq = make_seq(2, 3);
        Rng rng(99);
        for (Tick t = 0; t < 20; ++t) {
            size_t n = rng.below(3);
            for (size_t i = 0; i < n; ++i)
                seq.submit(to_bytes("+" + std::to_string(rng.below(10))), t);
        }
        std::vector<Bytes> blocks;
        for (Tick t = 0; t < 30; ++t)
            for (auto& r : seq.step(t)) blocks.push_back(r.block.serialize());
        return blocks;
    };
    CHECK(run() == run());
}

TEST_CASE("honest fault policy output is identical to fault-free") {
    auto run = [](FaultPolicy p) {
        auto seq = make_seq(2, 2);
        for (Tick t = 0; t < 10; ++t) seq.submit(to_bytes("+1"), t);
        std::vector<Bytes> blocks;
        for (Tick t = 0; t < 12; ++t)
            for (auto& r : seq.step(t)) blocks.push_back(r.block.serialize());
        return blocks;
    };
    CHECK(run({}) == run({FaultMode::honest, 2}));
}

TEST_CASE("corrupt_post_root: self-consistent commitments with a lying root") {
    FaultPolicy p{FaultMode::corrupt_post_root, 1};
    auto seq = make_seq(2, 100, p);
    auto reg = registry_for(seq.config());
    for (int i = 0; i < 4; ++i) seq.submit(to_bytes("+1"), 0);
    auto receipts = seq.step(0);
    REQUIRE(receipts.size() == 2);
    const auto& bad = receipts[1];
    CHECK(bad.block.post_root != seq.honest_post_root(1));
    CHECK(bad.block.block_hash == bad.block.compute_hash());
    CHECK(bad.block.transitions_root == merkle_root(transition_leaves(bad.block.transitions)));
    CHECK(reg.verify(bad.attestation));  // the adversary's attestation still verifies
}

TEST_CASE("forge_attestation: block honest, signature bad") {
    FaultPolicy p{FaultMode::forge_attestation, 0};
    auto seq = make_seq(1, 1, p);
    auto reg = registry_for(seq.config());
    seq.submit(to_bytes("+1"), 0);
    auto receipts = seq.step(0);
    REQUIRE(receipts.size() == 1);
    CHECK(receipts[0].block.post_root == seq.honest_post_root(0));
    CHECK_FALSE(reg.verify(receipts[0].attestation));
}

TEST_CASE("schedule parser: format and diagnostics") {
    auto entries = parse_input_schedule("# comment\n3 counter KzE=\n\n1 spot AA==\n");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].tick == 3);
    CHECK(entries[0].app_id == "counter");
    CHECK(entries[0].input == to_bytes("+1"));
    CHECK(entries[1].input == Bytes{0x00});

    CHECK_THROWS_WITH_AS((void)parse_input_schedule("1 counter not-base64!"),
                         doctest::Contains("line 1"), Error);
    CHECK_THROWS_WITH_AS((void)parse_input_schedule("oops"), doctest::Contains("line 1"), Error);
}
