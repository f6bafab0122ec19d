#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chainless/agglayer.hpp"
#include "chainless/da.hpp"
#include "chainless/spot.hpp"
#include "chainless/trust.hpp"

namespace chainless::scen {

/// One app binding: which chain it lives on, its FSM kind, sequencing and
/// verification parameters, and an optional scripted fault.
struct AppSpec {
    std::string id;
    std::string kind = "counter";  // "counter" or "zkspot"
    agg::ChainId chain = 0;
    std::vector<spot::Market> markets;  // zkspot only
    uint64_t mu = 4;
    uint64_t nu = 4;
    trust::TrustModel trust = trust::TrustModel::full();
    da::DaMode da = da::DaMode::public_full;
    FaultPolicy fault;
    uint32_t byzantine = 0;   // committee: first k validators lie
    bool challenger = true;   // optimistic: honest watcher on/off
};

struct FundDecl {
    agg::ChainId chain = 0;
    std::string account;
    std::string token;
    uint64_t amount = 0;
};

enum class ActionKind : uint8_t {
    raw_input,    // app, payload
    place,        // app, account, side, market, price, amount
    cancel,       // app, account, order_id
    withdraw,     // app, account, token, amount, dest_chain
    deposit,      // origin_chain, app, account, token, amount
    forge_claim,  // origin_chain, dest_chain, token, amount
    inject_fault, // app, fault
    settle,
    claim_all,    // attempt to claim everything outstanding now
};

struct Action {
    Tick tick = 0;
    ActionKind kind = ActionKind::settle;
    std::string app;
    std::string account;
    std::string token;
    std::string market;
    spot::Side side = spot::Side::buy;
    uint64_t price = 0;
    uint64_t amount = 0;
    uint64_t order_id = 0;
    agg::ChainId origin = 0;
    agg::ChainId destination = 0;
    Bytes payload;
    FaultPolicy fault;
};

enum class ExpectKind : uint8_t {
    verdict,           // app, block_no, expected verdict
    chain_balance,     // chain, account, token, amount
    app_available,     // app, account, token, amount
    app_locked,        // app, account, token, amount
    conservation,      // every settle checkpoint balanced, all tokens
    premature_claims,  // exact count of too-early claim attempts
    pessimistic_denials,  // exact count of denied bridge claims
    rejected_blocks,   // app, count of rejected verification receipts
    settled_epochs,    // count
};

struct Expectation {
    ExpectKind kind = ExpectKind::conservation;
    std::string app;
    std::string account;
    std::string token;
    agg::ChainId chain = 0;
    uint64_t block_no = 0;
    uint64_t amount = 0;
    trust::Verdict verdict = trust::Verdict::accepted;
    std::string name;  // as written in the file; report key
};

struct Scenario {
    uint64_t seed = 0;
    Tick run_until = 0;
    std::vector<agg::ChainId> chains;
    std::vector<FundDecl> funds;
    std::vector<AppSpec> apps;
    std::vector<Action> actions;
    std::vector<Expectation> expectations;

    const AppSpec* find_app(const std::string& id) const;
};

/// Parses the line-oriented scenario schema; throws Errc::config with a
/// "line N" diagnostic on any schema violation, including undeclared ids and
/// decreasing schedule ticks.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace chainless::scen
