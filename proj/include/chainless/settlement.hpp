#pragma once

#include <map>
#include <string>
#include <vector>

#include "chainless/agglayer.hpp"

namespace chainless::settle {

struct SettlementRecord {
    uint64_t epoch = 0;
    std::string app_id;
    Digest state_root;
    Digest bridge_root;  // GER at finalization
    Tick finalized_at = 0;
    bool finalized = true;

    std::string export_line() const;
};

/// Per-app latest finalized state root; the fold over the settlement log.
struct CanonicalView {
    std::map<std::string, std::pair<Digest, uint64_t>> latest;  // app -> (root, epoch)
    std::map<agg::ChainId, Digest> bridge_roots;                // latest anchored
    Digest ger;
};

/// Simulated base chain. Checks receipt verdicts, the aggregate digest, and
/// per-app root continuity; never re-executes app logic. Aggregates finalize
/// all-or-nothing.
class SettlementChain {
public:
    void register_app(const std::string& app_id, const Digest& genesis_root);

    /// Throws Errc::digest_mismatch / non_accepted_receipt /
    /// continuity_violation / overwrite; on any throw, nothing is recorded.
    std::vector<SettlementRecord> submit_aggregate(const agg::AggregatedProof& aggregate, Tick now);

    /// Latest finalized (root, epoch) for an app; throws Errc::unknown_app
    /// when the app has no finalized record.
    std::pair<Digest, uint64_t> query_canonical_root(const std::string& app_id) const;

    const CanonicalView& canonical_view() const { return view_; }
    const std::vector<SettlementRecord>& log() const { return log_; }
    const std::map<agg::ChainId, Digest>& anchored_bridge_roots() const {
        return view_.bridge_roots;
    }

private:
    std::map<std::string, Digest> genesis_roots_;
    CanonicalView view_;
    std::vector<SettlementRecord> log_;
    std::map<std::pair<uint64_t, std::string>, bool> seen_;  // (epoch, app) uniqueness
    uint64_t last_epoch_ = 0;
    bool any_epoch_ = false;
};

}  // namespace chainless::settle
