#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "chainless/fsm.hpp"

namespace chainless::spot {

enum class Side : uint8_t { buy = 0, sell = 1 };

struct Market {
    std::string base;
    std::string quote;
    std::string name() const { return base + "/" + quote; }
};

struct Balance {
    uint64_t available = 0;
    uint64_t locked = 0;
};

struct Order {
    uint64_t order_id = 0;
    std::string account;
    Side side = Side::buy;
    uint64_t price = 0;      // quote units per base unit
    uint64_t remaining = 0;  // base units
};

struct Book {
    std::vector<Order> bids;  // (price desc, order_id asc)
    std::vector<Order> asks;  // (price asc, order_id asc)
};

struct PendingWithdrawal {
    uint64_t id = 0;
    std::string account;
    std::string token;
    uint64_t amount = 0;
    uint32_t destination = 0;
};

struct TradeEvent {
    uint64_t maker_order_id = 0;
    uint64_t taker_order_id = 0;
    uint64_t price = 0;  // maker's resting price
    uint64_t quantity = 0;
};

/// Full zkSpot state. Serialization is canonical: maps iterate in key order,
/// books in market-list order, and zero balances are dropped, so equal
/// logical states encode byte-identically.
struct SpotState {
    std::vector<Market> markets;
    std::map<std::pair<std::string, std::string>, Balance> balances;  // (account, token)
    std::map<std::string, Book> books;                                // market name
    uint64_t next_order_id = 1;
    std::set<uint64_t> consumed_nonces;
    std::vector<PendingWithdrawal> pending_withdrawals;
    uint64_t next_withdrawal_id = 1;

    Bytes serialize() const;
    static SpotState deserialize(const Bytes& b);
    static SpotState genesis(std::vector<Market> markets);

    Balance balance(const std::string& account, const std::string& token) const;
};

// --- input codec: 1-byte tag + fixed-order fields, all integers big-endian ---

struct PlaceLimit {
    std::string account;
    std::string market;
    Side side = Side::buy;
    uint64_t price = 0;
    uint64_t quantity = 0;
};
struct Cancel {
    std::string account;
    uint64_t order_id = 0;
};
struct DepositCredit {
    std::string account;
    std::string token;
    uint64_t amount = 0;
    uint64_t bridge_nonce = 0;
};
struct WithdrawLock {
    std::string account;
    std::string token;
    uint64_t amount = 0;
    uint32_t destination = 0;
};
/// Burns a pending withdrawal once its epoch finalized and the locked funds
/// moved into bridge escrow; submitted by the settlement plumbing, not users.
struct WithdrawFinalize {
    uint64_t withdrawal_id = 0;
};

using SpotInput = std::variant<PlaceLimit, Cancel, DepositCredit, WithdrawLock, WithdrawFinalize>;

Bytes encode_input(const SpotInput& in);
SpotInput decode_input(const Bytes& b);  // throws Errc::io on malformed bytes

/// Applies one input in place. Returns the reject reason on failure, in
/// which case the state is left untouched. Fills `trades` (when given) with
/// the fills produced by a PlaceLimit.
std::optional<std::string> apply_input(SpotState& state, const SpotInput& in,
                                       std::vector<TradeEvent>* trades = nullptr);

/// core_fsm adapter; genesis markets are fixed at construction.
class SpotApp : public App {
public:
    explicit SpotApp(std::vector<Market> markets) : markets_(std::move(markets)) {}
    std::string kind() const override { return "zkspot"; }
    ApplyOutcome apply(const Bytes& state, const Bytes& input) const override;
    Bytes genesis_state() const { return SpotState::genesis(markets_).serialize(); }

private:
    std::vector<Market> markets_;
    // decode cache: sequencers feed each apply() the bytes the previous one
    // produced, so remembering the last (bytes, state) pair skips the decode
    mutable std::mutex cache_mu_;
    mutable Bytes cache_bytes_;
    mutable std::optional<SpotState> cache_state_;
};

}  // namespace chainless::spot
