#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chainless/scenario.hpp"
#include "chainless/settlement.hpp"

namespace chainless::harness {

struct RunOptions {
    bool serial = false;                   // disable per-app parallel verification
    std::optional<uint64_t> seed_override;
    std::string out_dir;                   // exports written here when non-empty
};

/// Cumulative counters snapshotted at each settle checkpoint plus one final
/// row at end of run.
struct EpochMetrics {
    uint64_t epoch = 0;
    uint64_t transitions_executed = 0;
    uint64_t transitions_replayed = 0;
    uint64_t blocks_sealed = 0;
    uint64_t accepted = 0;
    uint64_t rejected = 0;
    uint64_t pending = 0;
    uint64_t bridge_events = 0;
    uint64_t pessimistic_denials = 0;

    std::string export_line() const;
};

struct ExpectationResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::vector<EpochMetrics> epochs;
    std::vector<ExpectationResult> expectations;
    Digest fingerprint;
    uint64_t transitions_executed = 0;
    uint64_t transitions_replayed = 0;
    uint64_t rejected_receipts = 0;
    uint64_t premature_claims = 0;
    uint64_t pessimistic_denials = 0;

    bool all_passed() const;
    std::string text_report() const;
    std::string machine_report() const;
};

/// Executes the scenario on the discrete tick clock. Throws Errc::config for
/// invalid runtime references (e.g. depositing funds nobody holds); any other
/// throw is a bug, not a scenario outcome.
RunReport run_scenario(const scen::Scenario& scenario, const RunOptions& options = {});

struct TrustRow {
    std::string model;
    bool detected = false;          // any rejected verification receipt
    uint64_t rejected_blocks = 0;
    uint64_t transitions_replayed = 0;
};

/// Runs the scenario once per model with every app's trust model overridden;
/// the verification-cost/detection table.
std::vector<TrustRow> compare_trust_models(const scen::Scenario& scenario,
                                           const std::vector<trust::TrustModel>& models);

struct TraceVerifyResult {
    bool ok = false;
    std::string detail;  // first failure, or "ok"
    uint64_t apps = 0;
    uint64_t blocks = 0;
    uint64_t transitions = 0;
};

/// Offline replay of a trace export (the "trace.log" a run writes): checks
/// hash-chain linkage, root continuity from genesis, and full re-execution
/// of every transition. Throws Errc::config on a malformed document.
TraceVerifyResult verify_trace_export(const std::string& text);

}  // namespace chainless::harness
