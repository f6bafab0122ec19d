#include "chainless/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "chainless/counter_app.hpp"
#include "chainless/rng.hpp"

namespace chainless::harness {

namespace fs = std::filesystem;

std::string EpochMetrics::export_line() const {
    std::ostringstream s;
    s << "epoch=" << epoch << " executed=" << transitions_executed
      << " replayed=" << transitions_replayed << " blocks=" << blocks_sealed
      << " accepted=" << accepted << " rejected=" << rejected << " pending=" << pending
      << " bridge_events=" << bridge_events << " denials=" << pessimistic_denials;
    return s.str();
}

bool RunReport::all_passed() const {
    return std::all_of(expectations.begin(), expectations.end(),
                       [](const ExpectationResult& e) { return e.pass; });
}

std::string RunReport::text_report() const {
    std::ostringstream s;
    s << "fingerprint " << fingerprint.hex() << "\n";
    for (const auto& m : epochs) s << m.export_line() << "\n";
    s << "totals executed=" << transitions_executed << " replayed=" << transitions_replayed
      << " rejected_receipts=" << rejected_receipts << " premature_claims=" << premature_claims
      << " denials=" << pessimistic_denials << "\n";
    for (const auto& e : expectations) {
        s << "expect [" << (e.pass ? "pass" : "FAIL") << "] " << e.name;
        if (!e.detail.empty()) s << " -- " << e.detail;
        s << "\n";
    }
    s << "result " << (all_passed() ? "pass" : "fail") << "\n";
    return s.str();
}

std::string RunReport::machine_report() const {
    std::ostringstream s;
    s << "fingerprint=" << fingerprint.hex() << "\n";
    s << "epochs=" << epochs.size() << "\n";
    for (const auto& m : epochs) s << m.export_line() << "\n";
    s << "transitions_executed=" << transitions_executed << "\n";
    s << "transitions_replayed=" << transitions_replayed << "\n";
    s << "rejected_receipts=" << rejected_receipts << "\n";
    s << "premature_claims=" << premature_claims << "\n";
    s << "pessimistic_denials=" << pessimistic_denials << "\n";
    for (const auto& e : expectations)
        s << "expectation name=\"" << e.name << "\" pass=" << (e.pass ? 1 : 0) << "\n";
    s << "result=" << (all_passed() ? "pass" : "fail") << "\n";
    return s.str();
}

namespace {

std::shared_ptr<App> make_app(const scen::AppSpec& spec) {
    if (spec.kind == "counter") return std::make_shared<CounterApp>();
    return std::make_shared<spot::SpotApp>(spec.markets);
}

Bytes genesis_for(const scen::AppSpec& spec) {
    if (spec.kind == "counter") return CounterApp::encode_state(0);
    return spot::SpotState::genesis(spec.markets).serialize();
}

struct AppRuntime {
    scen::AppSpec spec;
    std::shared_ptr<App> app;
    Sequencer seq;
    std::vector<trust::ValidatorRecord> validators;
    trust::OptimisticTracker tracker;
    std::map<uint64_t, trust::VerificationReceipt> verdicts;  // block_no -> latest
    uint64_t next_verified = 0;   // blocks below this have a verdict (or pending entry)
    uint64_t next_settled = 0;    // blocks below this are finalized on the settlement chain
    uint64_t scanned_for_withdrawals = 0;  // finalized blocks scanned
    uint64_t withdrawal_ids_seen = 0;      // mirrors SpotState id assignment
    Digest settled_root;                   // canonical root on the settlement chain

    AppRuntime(const scen::AppSpec& s, std::shared_ptr<App> a, SequencerConfig cfg)
        : spec(s), app(a), seq(a, std::move(cfg), s.fault) {}
};

// One bridge event the harness still has to claim and apply downstream.
struct PendingCredit {
    agg::BridgeEvent event;
    std::string app;      // non-empty: deliver a DepositCredit to this app
    std::string account;
    bool claimed = false;
};

struct Simulation {
    const scen::Scenario& scenario;
    RunOptions options;
    uint64_t seed;

    agg::Agglayer agglayer;
    settle::SettlementChain settlement;
    da::DaStore store;
    AttestationRegistry registry;
    std::vector<std::unique_ptr<AppRuntime>> apps;
    std::map<agg::ChainId, std::map<std::pair<std::string, std::string>, uint64_t>> ledgers;

    std::vector<PendingCredit> pending;  // deposits toward apps and chains
    std::map<Tick, std::vector<std::pair<std::string, Bytes>>> deliveries;
    std::map<std::string, uint64_t> in_flight;   // token -> claimed, not yet in app state
    std::map<std::string, uint64_t> double_counted;  // token -> locked-and-escrowed withdrawals
    std::map<std::string, uint64_t> initial_totals;

    RunReport report;
    EpochMetrics metrics;  // cumulative, snapshotted per epoch
    uint64_t settled_epochs = 0;
    uint64_t forged_nonce = uint64_t(1) << 32;
    bool conservation_ok = true;
    std::string conservation_detail;

    explicit Simulation(const scen::Scenario& sc, const RunOptions& opts)
        : scenario(sc), options(opts),
          seed(opts.seed_override.value_or(sc.seed)),
          agglayer(sc.chains) {
        for (const auto& f : sc.funds) {
            ledgers[f.chain][{f.account, f.token}] += f.amount;
            initial_totals[f.token] += f.amount;
        }
        for (const auto& spec : sc.apps) {
            auto app = make_app(spec);
            SequencerConfig cfg;
            cfg.mu = spec.mu;
            cfg.nu = spec.nu;
            cfg.app_id = spec.id;
            cfg.genesis_state = genesis_for(spec);
            cfg.attestation_key = Bytes(sha256(to_bytes("enclave-key:" + spec.id)).v.begin(), sha256(to_bytes("enclave-key:" + spec.id)).v.end());
            cfg.enclave_id = "enclave:" + spec.id;
            registry.register_enclave(cfg.enclave_id, cfg.attestation_key);
            settlement.register_app(spec.id, sha256(cfg.genesis_state));
            Digest genesis_root = sha256(cfg.genesis_state);
            apps.push_back(std::make_unique<AppRuntime>(spec, app, std::move(cfg)));
            auto& rt = *apps.back();
            rt.settled_root = genesis_root;
            for (uint32_t i = 0; i < spec.trust.n; ++i) {
                trust::ValidatorRecord v;
                v.validator_id = spec.id + ":v" + std::to_string(i);
                v.stake = spec.trust.stake;
                v.key = to_bytes(v.validator_id + ":key");
                v.byzantine = i < spec.byzantine;
                rt.validators.push_back(std::move(v));
            }
        }
    }

    AppRuntime& runtime(const std::string& id) {
        for (auto& a : apps)
            if (a->spec.id == id) return *a;
        throw Error(Errc::unknown_app, "no app " + id);
    }

    void submit(AppRuntime& rt, Bytes input, Tick now) {
        (void)rt.seq.submit(std::move(input), now);
    }

    // ---- scheduled actions ----------------------------------------------

    void run_action(const scen::Action& a, Tick now) {
        using scen::ActionKind;
        switch (a.kind) {
            case ActionKind::raw_input:
                submit(runtime(a.app), a.payload, now);
                break;
            case ActionKind::place:
                submit(runtime(a.app),
                       spot::encode_input(spot::PlaceLimit{a.account, a.market, a.side, a.price,
                                                           a.amount}),
                       now);
                break;
            case ActionKind::cancel:
                submit(runtime(a.app), spot::encode_input(spot::Cancel{a.account, a.order_id}),
                       now);
                break;
            case ActionKind::withdraw:
                submit(runtime(a.app),
                       spot::encode_input(spot::WithdrawLock{a.account, a.token, a.amount,
                                                             a.destination}),
                       now);
                break;
            case ActionKind::deposit: {
                auto& bal = ledgers[a.origin][{a.account, a.token}];
                if (bal < a.amount)
                    throw Error(Errc::config, "tick " + std::to_string(now) + ": account " +
                                                  a.account + " lacks " + a.token + " on chain " +
                                                  std::to_string(a.origin));
                auto& rt = runtime(a.app);
                bal -= a.amount;
                auto ev = agglayer.bridge_deposit(a.origin, rt.spec.chain, a.token, a.amount);
                pending.push_back({ev, rt.spec.id, a.account, false});
                ++metrics.bridge_events;
                break;
            }
            case ActionKind::forge_claim: {
                agg::BridgeEvent forged{agg::EventKind::claim, a.origin, a.destination, a.token,
                                        a.amount, forged_nonce++, {}};
                try {
                    agglayer.bridge_claim_forged(forged);
                    // a forged claim that passed the invariant: credit the attacker
                    ledgers[a.destination][{"attacker", a.token}] += a.amount;
                } catch (const Error&) {
                    ++metrics.pessimistic_denials;
                }
                break;
            }
            case ActionKind::inject_fault:
                runtime(a.app).seq.set_fault(a.fault);
                break;
            case ActionKind::settle:
                do_settle(now);
                break;
            case ActionKind::claim_all:
                process_claims(now, /*count_premature=*/true);
                break;
        }
    }

    // ---- verification ----------------------------------------------------

    trust::VerificationReceipt verify_one(AppRuntime& rt, const BatchReceipt& receipt, Tick now) {
        const auto& block = receipt.block;
        const auto model = rt.spec.trust;
        AppStateView pre{rt.spec.id, rt.seq.honest_pre_state(block.block_no), block.block_no};

        auto rejected = [&](const std::string& why) {
            trust::VerificationReceipt r;
            r.app_id = rt.spec.id;
            r.block_no = block.block_no;
            r.pre_root = block.pre_root;
            r.post_root = block.post_root;
            r.trace_commitment = block.block_hash;
            r.model = model.kind;
            r.verdict = trust::Verdict::rejected;
            r.evidence = to_bytes(why);
            return r;
        };

        if (model.kind == trust::ModelKind::operator_trust)
            return trust::operator_accept(block, rt.spec.id);

        if (model.kind == trust::ModelKind::tee_spotcheck) {
            uint64_t sub = Rng::derive(seed, "spotcheck:" + rt.spec.id + ":" +
                                                 std::to_string(block.block_no));
            return trust::verify_tee_spotcheck(receipt, registry, *rt.app, pre,
                                               model.sample_rate, sub);
        }

        // replay-based models read the trace body from the DA store
        TraceBlock body;
        try {
            body = store.fetch_block(block.block_hash);
        } catch (const Error& e) {
            return rejected(std::string("trace data unavailable: ") + e.what());
        }
        if (!registry.verify(receipt.attestation)) return rejected("attestation check failed");

        try {
            switch (model.kind) {
                case trust::ModelKind::full_reexecution:
                    return trust::verify_full(body, *rt.app, pre);
                case trust::ModelKind::committee:
                    return trust::verify_committee(body, *rt.app, pre, rt.validators, model.q);
                case trust::ModelKind::optimistic:
                    return rt.tracker.open(body, rt.spec.id, now, model.window);
                default:
                    break;
            }
        } catch (const Error& e) {
            return rejected(e.what());
        }
        return rejected("unreachable model");
    }

    // Verifies everything newly sealed for one app; returns the number of
    // transitions replayed so parallel callers never race on shared metrics.
    uint64_t verify_app(AppRuntime& rt, Tick now) {
        uint64_t replayed = 0;
        const auto& sealed = rt.seq.sealed();
        for (; rt.next_verified < sealed.size(); ++rt.next_verified) {
            const auto& receipt = sealed[rt.next_verified];
            auto vr = verify_one(rt, receipt, now);
            replayed += vr.transitions_replayed;
            rt.verdicts[receipt.block.block_no] = vr;
        }
        // optimistic upkeep: honest watcher challenges, windows expire
        if (rt.spec.trust.kind == trust::ModelKind::optimistic) {
            if (rt.spec.challenger) {
                for (auto& [block_no, vr] : rt.verdicts) {
                    if (vr.verdict != trust::Verdict::pending) continue;
                    TraceBlock body;
                    try {
                        body = store.fetch_block(vr.trace_commitment);
                    } catch (const Error&) {
                        continue;  // no data, no challenge
                    }
                    AppStateView pre{rt.spec.id, rt.seq.honest_pre_state(block_no), block_no};
                    std::optional<trust::FraudProof> proof;
                    try {
                        proof = trust::file_fraud_proof(body, *rt.app, pre);
                    } catch (const Error&) {
                        continue;
                    }
                    replayed += body.transitions.size();
                    if (proof && rt.tracker.challenge(block_no, *proof, now, *rt.app))
                        rt.verdicts[block_no] = *rt.tracker.receipt(block_no);
                }
            }
            for (auto& upgraded : rt.tracker.finalize_due(now))
                rt.verdicts[upgraded.block_no] = upgraded;
        }
        return replayed;
    }

    void verification_phase(Tick now) {
        if (options.serial || apps.size() <= 1) {
            for (auto& rt : apps) metrics.transitions_replayed += verify_app(*rt, now);
            return;
        }
        // parallel across apps (each app's blocks stay sequential); results
        // merge in declaration order, so the outcome matches serial mode
        std::vector<std::future<uint64_t>> jobs;
        for (auto& rt : apps)
            jobs.push_back(std::async(std::launch::async,
                                      [this, &rt, now] { return verify_app(*rt, now); }));
        for (auto& j : jobs) metrics.transitions_replayed += j.get();
    }

    // ---- settlement ------------------------------------------------------

    void do_settle(Tick now) {
        uint64_t epoch = settled_epochs + 1;
        std::vector<trust::VerificationReceipt> receipts;
        struct Finalized {
            AppRuntime* rt;
            uint64_t upto;  // exclusive block index into sealed()
            Digest new_root;
        };
        std::vector<Finalized> finalized;
        for (auto& rtp : apps) {
            auto& rt = *rtp;
            uint64_t upto = rt.next_settled;
            Digest expected = rt.settled_root;
            const auto& sealed = rt.seq.sealed();
            while (upto < sealed.size()) {
                auto it = rt.verdicts.find(sealed[upto].block.block_no);
                if (it == rt.verdicts.end() || it->second.verdict != trust::Verdict::accepted)
                    break;
                // an honest aggregator never submits receipts the settlement
                // chain would refuse: stop at the first continuity break (a
                // wrongly-accepted corrupt root strands every later block)
                if (it->second.pre_root != expected) break;
                expected = it->second.post_root;
                receipts.push_back(it->second);
                ++upto;
            }
            if (upto > rt.next_settled) finalized.push_back({&rt, upto, expected});
        }

        // convert withdrawals locked in blocks that are about to finalize
        for (auto& f : finalized) convert_withdrawals(*f.rt, f.upto, now);

        auto roots = agglayer.snapshot_roots();
        auto proof = agg::aggregate(std::move(receipts), roots, epoch);
        settlement.submit_aggregate(proof, now);
        agglayer.update_global_exit_root(roots);
        agglayer.anchor_roots(roots);
        for (auto& f : finalized) {
            f.rt->next_settled = f.upto;
            f.rt->settled_root = f.new_root;
        }
        settled_epochs = epoch;

        process_claims(now, /*count_premature=*/false);
        check_conservation(epoch);
        flush_metrics(epoch);
    }

    void convert_withdrawals(AppRuntime& rt, uint64_t upto, Tick now) {
        if (rt.spec.kind != "zkspot") {
            rt.scanned_for_withdrawals = upto;
            return;
        }
        const auto& sealed = rt.seq.sealed();
        for (; rt.scanned_for_withdrawals < upto; ++rt.scanned_for_withdrawals) {
            // scan the honest trace: published transitions may be corrupted,
            // but corrupted blocks never reach this point (not accepted)
            for (const auto& tr : sealed[rt.scanned_for_withdrawals].block.transitions) {
                spot::SpotInput input;
                try {
                    input = spot::decode_input(tr.input);
                } catch (const Error&) {
                    continue;
                }
                const auto* lock = std::get_if<spot::WithdrawLock>(&input);
                if (!lock) continue;
                uint64_t id = ++rt.withdrawal_ids_seen;  // ids are 1-based, monotone
                auto ev = agglayer.bridge_deposit(rt.spec.chain, lock->destination, lock->token,
                                                  lock->amount);
                ++metrics.bridge_events;
                pending.push_back({ev, "", lock->account, false});
                // the locked funds now exist both in app state and in bridge
                // escrow until the burn input executes
                double_counted[lock->token] += lock->amount;
                deliveries[now + 1].push_back(
                    {rt.spec.id, spot::encode_input(spot::WithdrawFinalize{id})});
            }
        }
    }

    void process_claims(Tick now, bool count_premature) {
        for (auto& p : pending) {
            if (p.claimed) continue;
            MerkleProof proof;
            try {
                proof = agglayer.prove_inclusion(p.event);
            } catch (const Error&) {
                if (count_premature) ++report.premature_claims;
                continue;
            }
            try {
                agglayer.bridge_claim(p.event, proof);
            } catch (const Error&) {
                ++metrics.pessimistic_denials;
                continue;
            }
            p.claimed = true;
            if (p.app.empty()) {
                // withdrawal arriving on a plain chain ledger
                ledgers[p.event.destination][{p.account, p.event.token}] += p.event.amount;
            } else {
                in_flight[p.event.token] += p.event.amount;
                deliveries[now + 1].push_back(
                    {p.app, spot::encode_input(spot::DepositCredit{p.account, p.event.token,
                                                                   p.event.amount,
                                                                   p.event.nonce})});
            }
        }
    }

    // ---- conservation ----------------------------------------------------

    uint64_t app_pool(const AppRuntime& rt, const std::string& token) const {
        if (rt.spec.kind != "zkspot") return 0;
        auto state = spot::SpotState::deserialize(rt.seq.state().serialized_state);
        uint64_t total = 0;
        for (const auto& [key, bal] : state.balances)
            if (key.second == token) total += bal.available + bal.locked;
        return total;
    }

    void check_conservation(uint64_t epoch) {
        for (const auto& [token, expected] : initial_totals) {
            uint64_t total = 0;
            for (const auto& [chain, ledger] : ledgers)
                for (const auto& [key, amount] : ledger)
                    if (key.second == token) total += amount;
            for (const auto& rt : apps) total += app_pool(*rt, token);
            for (const auto& [key, position] : agglayer.ledger().positions())
                if (key.second == token) total += position;
            total += in_flight[token];
            total -= double_counted[token];
            if (total != expected && conservation_ok) {
                conservation_ok = false;
                conservation_detail = "epoch " + std::to_string(epoch) + ": token " + token +
                                      " total " + std::to_string(total) + " != initial " +
                                      std::to_string(expected);
            }
        }
    }

    void flush_metrics(uint64_t epoch) {
        EpochMetrics row = metrics;
        row.epoch = epoch;
        std::tie(row.accepted, row.rejected, row.pending) = verdict_counts();
        report.epochs.push_back(row);
    }

    std::tuple<uint64_t, uint64_t, uint64_t> verdict_counts() const {
        uint64_t a = 0, r = 0, p = 0;
        for (const auto& rt : apps)
            for (const auto& [block_no, vr] : rt->verdicts) {
                if (vr.verdict == trust::Verdict::accepted) ++a;
                if (vr.verdict == trust::Verdict::rejected) ++r;
                if (vr.verdict == trust::Verdict::pending) ++p;
            }
        return {a, r, p};
    }

    // ---- main loop and reporting ------------------------------------------

    RunReport run() {
        size_t next_action = 0;
        for (Tick t = 0; t <= scenario.run_until; ++t) {
            auto dv = deliveries.find(t);
            if (dv != deliveries.end()) {
                for (auto& [app_id, input] : dv->second) {
                    // credit is about to enter app state via the sequencer
                    auto decoded = spot::decode_input(input);
                    if (const auto* d = std::get_if<spot::DepositCredit>(&decoded))
                        in_flight[d->token] -= d->amount;
                    if (const auto* f = std::get_if<spot::WithdrawFinalize>(&decoded))
                        settle_burn(*f, app_id);
                    submit(runtime(app_id), input, t);
                }
                deliveries.erase(dv);
            }
            while (next_action < scenario.actions.size() &&
                   scenario.actions[next_action].tick == t)
                run_action(scenario.actions[next_action++], t);
            for (auto& rt : apps) {
                auto sealed_before = rt->seq.sealed().size();
                (void)rt->seq.step(t);
                const auto& sealed = rt->seq.sealed();
                for (size_t i = sealed_before; i < sealed.size(); ++i) {
                    store.publish(sealed[i].block,
                                  {rt->spec.da});
                    ++metrics.blocks_sealed;
                    metrics.transitions_executed += sealed[i].block.transitions.size();
                }
            }
            verification_phase(t);
        }
        flush_metrics(settled_epochs + 1);  // final partial window

        finish_report();
        return std::move(report);
    }

    void settle_burn(const spot::WithdrawFinalize& fin, const std::string& app_id) {
        // locate the amount being burned so the double-count adjustment
        // tracks the exact token totals
        auto& rt = runtime(app_id);
        auto state = spot::SpotState::deserialize(rt.seq.state().serialized_state);
        for (const auto& w : state.pending_withdrawals)
            if (w.id == fin.withdrawal_id) {
                double_counted[w.token] -= w.amount;
                return;
            }
    }

    std::string export_receipts() const {
        std::string out;
        for (const auto& rt : apps)
            for (const auto& [block_no, vr] : rt->verdicts) out += vr.export_line() + "\n";
        return out;
    }

    std::string export_bridge() const {
        std::string out;
        for (const auto& ev : agglayer.event_log()) out += ev.export_line() + "\n";
        return out;
    }

    std::string export_settlement() const {
        std::string out;
        for (const auto& rec : settlement.log()) out += rec.export_line() + "\n";
        return out;
    }

    std::string export_traces() const {
        std::string out;
        for (const auto& rt : apps) {
            out += "app " + rt->spec.id + " " + rt->app->kind() + " " +
                   base64_encode(genesis_for(rt->spec)) + "\n";
            for (const auto& receipt : rt->seq.sealed())
                out += "block " + base64_encode(receipt.block.serialize()) + "\n";
        }
        return out;
    }

    std::string export_metrics() const {
        std::string out;
        for (const auto& m : report.epochs) out += m.export_line() + "\n";
        return out;
    }

    void finish_report() {
        report.transitions_executed = metrics.transitions_executed;
        report.transitions_replayed = metrics.transitions_replayed;
        report.pessimistic_denials = metrics.pessimistic_denials;
        auto [a, r, p] = verdict_counts();
        report.rejected_receipts = r;

        std::map<std::string, std::string> exports;
        exports["receipts.log"] = export_receipts();
        exports["bridge_events.log"] = export_bridge();
        exports["settlement.log"] = export_settlement();
        exports["trace.log"] = export_traces();
        exports["metrics.log"] = export_metrics();

        Bytes all;
        for (const auto& [name, content] : exports) {
            auto chunk = to_bytes(name + "\n" + content);
            all.insert(all.end(), chunk.begin(), chunk.end());
        }
        report.fingerprint = sha256(all);

        evaluate_expectations();

        if (!options.out_dir.empty()) {
            fs::create_directories(options.out_dir);
            for (const auto& [name, content] : exports) {
                std::ofstream out(fs::path(options.out_dir) / name, std::ios::binary);
                out << content;
            }
            std::ofstream rep(fs::path(options.out_dir) / "report.txt", std::ios::binary);
            rep << report.text_report();
        }
    }

    void evaluate_expectations() {
        using scen::ExpectKind;
        for (const auto& e : scenario.expectations) {
            ExpectationResult res;
            res.name = e.name;
            switch (e.kind) {
                case ExpectKind::verdict: {
                    auto& rt = runtime(e.app);
                    auto it = rt.verdicts.find(e.block_no);
                    if (it == rt.verdicts.end()) {
                        res.detail = "no verification receipt for block " +
                                     std::to_string(e.block_no);
                    } else {
                        res.pass = it->second.verdict == e.verdict;
                        if (!res.pass)
                            res.detail = std::string("verdict is ") +
                                         trust::verdict_name(it->second.verdict);
                    }
                    break;
                }
                case ExpectKind::chain_balance: {
                    auto it = ledgers[e.chain].find({e.account, e.token});
                    uint64_t have = it == ledgers[e.chain].end() ? 0 : it->second;
                    res.pass = have == e.amount;
                    if (!res.pass) res.detail = "balance is " + std::to_string(have);
                    break;
                }
                case ExpectKind::app_available:
                case ExpectKind::app_locked: {
                    auto& rt = runtime(e.app);
                    auto state = spot::SpotState::deserialize(rt.seq.state().serialized_state);
                    auto bal = state.balance(e.account, e.token);
                    uint64_t have =
                        e.kind == ExpectKind::app_available ? bal.available : bal.locked;
                    res.pass = have == e.amount;
                    if (!res.pass) res.detail = "balance is " + std::to_string(have);
                    break;
                }
                case ExpectKind::conservation:
                    res.pass = conservation_ok;
                    res.detail = conservation_detail;
                    break;
                case ExpectKind::premature_claims:
                    res.pass = report.premature_claims == e.amount;
                    if (!res.pass)
                        res.detail = "observed " + std::to_string(report.premature_claims);
                    break;
                case ExpectKind::pessimistic_denials:
                    res.pass = metrics.pessimistic_denials == e.amount;
                    if (!res.pass)
                        res.detail = "observed " + std::to_string(metrics.pessimistic_denials);
                    break;
                case ExpectKind::rejected_blocks: {
                    auto& rt = runtime(e.app);
                    uint64_t count = 0;
                    for (const auto& [block_no, vr] : rt.verdicts)
                        if (vr.verdict == trust::Verdict::rejected) ++count;
                    res.pass = count == e.amount;
                    if (!res.pass) res.detail = "observed " + std::to_string(count);
                    break;
                }
                case ExpectKind::settled_epochs:
                    res.pass = settled_epochs == e.amount;
                    if (!res.pass) res.detail = "observed " + std::to_string(settled_epochs);
                    break;
            }
            report.expectations.push_back(std::move(res));
        }
    }
};

}  // namespace

RunReport run_scenario(const scen::Scenario& scenario, const RunOptions& options) {
    Simulation sim(scenario, options);
    return sim.run();
}

std::vector<TrustRow> compare_trust_models(const scen::Scenario& scenario,
                                           const std::vector<trust::TrustModel>& models) {
    std::vector<TrustRow> rows;
    for (const auto& model : models) {
        scen::Scenario variant = scenario;
        for (auto& app : variant.apps) app.trust = model;
        variant.expectations.clear();  // expectations were written for the original model
        auto report = run_scenario(variant, {});
        TrustRow row;
        row.model = model.name();
        row.rejected_blocks = report.rejected_receipts;
        row.detected = report.rejected_receipts > 0;
        row.transitions_replayed = report.transitions_replayed;
        rows.push_back(std::move(row));
    }
    return rows;
}

TraceVerifyResult verify_trace_export(const std::string& text) {
    TraceVerifyResult result;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;

    std::shared_ptr<App> app;
    std::string app_id;
    AppStateView state;
    std::optional<Digest> prev_hash;
    uint64_t expect_block = 0;

    auto fail = [&](const std::string& why) {
        result.ok = false;
        result.detail = why;
        return result;
    };

    result.ok = true;
    result.detail = "ok";
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "app") {
            std::string kind, genesis_b64;
            ls >> app_id >> kind >> genesis_b64;
            if (app_id.empty() || kind.empty() || genesis_b64.empty())
                throw Error(Errc::config, "line " + std::to_string(line_no) +
                                              ": usage: app <id> <kind> <base64 genesis>");
            auto genesis = base64_decode(genesis_b64);
            if (!genesis)
                throw Error(Errc::config,
                            "line " + std::to_string(line_no) + ": bad base64 genesis");
            if (kind == "counter")
                app = std::make_shared<CounterApp>();
            else if (kind == "zkspot")
                app = std::make_shared<spot::SpotApp>(std::vector<spot::Market>{});
            else
                throw Error(Errc::config,
                            "line " + std::to_string(line_no) + ": unknown app kind " + kind);
            state = AppStateView{app_id, *genesis, 0};
            prev_hash.reset();
            expect_block = 0;
            ++result.apps;
        } else if (kw == "block") {
            if (!app)
                throw Error(Errc::config,
                            "line " + std::to_string(line_no) + ": block before any app header");
            std::string b64;
            ls >> b64;
            auto raw = base64_decode(b64);
            if (!raw)
                throw Error(Errc::config, "line " + std::to_string(line_no) + ": bad base64 block");
            TraceBlock block;
            try {
                ByteReader r(*raw);
                block = TraceBlock::deserialize(r);
            } catch (const Error& e) {
                throw Error(Errc::config, "line " + std::to_string(line_no) +
                                              ": undecodable block: " + e.what());
            }
            ++result.blocks;
            result.transitions += block.transitions.size();
            std::string at = app_id + " block " + std::to_string(block.block_no);
            if (block.block_no != expect_block) return fail(at + ": block number out of order");
            Digest want_prev = prev_hash.value_or(Digest::zero());
            if (block.prev_block_hash != want_prev) return fail(at + ": broken hash chain");
            if (block.block_hash != block.compute_hash())
                return fail(at + ": block hash does not recompute");
            if (block.pre_root != state.root())
                return fail(at + ": pre_root does not extend the replayed state");
            auto replay = trust::replay_block(block, *app, state);
            if (!replay.ok)
                return fail(at + ": replay diverges at transition " +
                            std::to_string(replay.divergent_seq));
            state = AppStateView{app_id, replay.final_state, block.block_no + 1};
            prev_hash = block.block_hash;
            ++expect_block;
        } else {
            throw Error(Errc::config,
                        "line " + std::to_string(line_no) + ": unknown directive " + kw);
        }
    }
    if (result.apps == 0) throw Error(Errc::config, "trace export contains no app sections");
    return result;
}

}  // namespace chainless::harness
