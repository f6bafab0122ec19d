#include "chainless/settlement.hpp"

#include <algorithm>

namespace chainless::settle {

std::string SettlementRecord::export_line() const {
    std::string line = std::to_string(epoch);
    line += ' ';
    line += app_id;
    line += ' ';
    line += state_root.hex();
    line += ' ';
    line += bridge_root.hex();
    line += ' ';
    line += std::to_string(finalized_at);
    line += ' ';
    line += finalized ? "finalized" : "rejected";
    return line;
}

void SettlementChain::register_app(const std::string& app_id, const Digest& genesis_root) {
    genesis_roots_[app_id] = genesis_root;
}

std::vector<SettlementRecord> SettlementChain::submit_aggregate(
    const agg::AggregatedProof& aggregate, Tick now) {
    if (aggregate.aggregate_digest !=
        agg::AggregatedProof::compute_digest(aggregate.epoch, aggregate.receipts,
                                             aggregate.bridge_roots))
        throw Error(Errc::digest_mismatch, "aggregate digest does not recompute");
    for (const auto& r : aggregate.receipts)
        if (r.verdict != trust::Verdict::accepted)
            throw Error(Errc::non_accepted_receipt,
                        "aggregate carries a non-accepted receipt for block " +
                            std::to_string(r.block_no));
    if (any_epoch_ && aggregate.epoch <= last_epoch_)
        throw Error(Errc::overwrite, "epoch " + std::to_string(aggregate.epoch) +
                                         " already finalized; records are immutable");

    // Group receipts per app in block order and check root continuity
    // before touching any state (all-or-nothing).
    std::map<std::string, std::vector<const trust::VerificationReceipt*>> per_app;
    for (const auto& r : aggregate.receipts) per_app[r.app_id].push_back(&r);
    for (auto& [app_id, receipts] : per_app) {
        std::sort(receipts.begin(), receipts.end(),
                  [](auto* a, auto* b) { return a->block_no < b->block_no; });
        Digest expected;
        auto latest = view_.latest.find(app_id);
        if (latest != view_.latest.end()) {
            expected = latest->second.first;
        } else {
            auto gen = genesis_roots_.find(app_id);
            if (gen == genesis_roots_.end())
                throw Error(Errc::unknown_app, "app " + app_id + " is not registered");
            expected = gen->second;
        }
        for (const auto* r : receipts) {
            if (r->pre_root != expected)
                throw Error(Errc::continuity_violation,
                            "app " + app_id + " block " + std::to_string(r->block_no) +
                                ": pre_root does not extend the finalized chain");
            expected = r->post_root;
        }
        if (seen_.count({aggregate.epoch, app_id}))
            throw Error(Errc::overwrite, "(epoch, app) already finalized");
    }

    // All checks passed; finalize.
    std::vector<Digest> ordered;
    for (const auto& [chain, root] : aggregate.bridge_roots) ordered.push_back(root);
    Digest ger = merkle_root(ordered);

    std::vector<SettlementRecord> out;
    for (auto& [app_id, receipts] : per_app) {
        SettlementRecord rec;
        rec.epoch = aggregate.epoch;
        rec.app_id = app_id;
        rec.state_root = receipts.back()->post_root;
        rec.bridge_root = ger;
        rec.finalized_at = now;
        rec.finalized = true;
        view_.latest[app_id] = {rec.state_root, aggregate.epoch};
        seen_[{aggregate.epoch, app_id}] = true;
        log_.push_back(rec);
        out.push_back(std::move(rec));
    }
    view_.bridge_roots = aggregate.bridge_roots;
    view_.ger = ger;
    last_epoch_ = aggregate.epoch;
    any_epoch_ = true;
    return out;
}

std::pair<Digest, uint64_t> SettlementChain::query_canonical_root(
    const std::string& app_id) const {
    auto it = view_.latest.find(app_id);
    if (it == view_.latest.end())
        throw Error(Errc::unknown_app, "no finalized record for app " + app_id);
    return it->second;
}

}  // namespace chainless::settle
