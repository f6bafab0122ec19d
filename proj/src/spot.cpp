#include "chainless/spot.hpp"

#include <algorithm>

namespace chainless::spot {

static bool mul_overflows(uint64_t a, uint64_t b) {
    return b != 0 && a > UINT64_MAX / b;
}

Balance SpotState::balance(const std::string& account, const std::string& token) const {
    auto it = balances.find({account, token});
    return it == balances.end() ? Balance{} : it->second;
}

Bytes SpotState::serialize() const {
    ByteWriter w;
    size_t orders = 0;
    for (const auto& [name, book] : books) orders += book.bids.size() + book.asks.size();
    w.reserve(64 + 48 * (orders + balances.size() + pending_withdrawals.size()) +
              8 * consumed_nonces.size());
    w.u32(uint32_t(markets.size()));
    for (const auto& m : markets) {
        w.str(m.base);
        w.str(m.quote);
    }
    uint32_t nonzero = 0;
    for (const auto& [k, b] : balances)
        if (b.available || b.locked) ++nonzero;
    w.u32(nonzero);
    for (const auto& [k, b] : balances) {
        if (!b.available && !b.locked) continue;
        w.str(k.first);
        w.str(k.second);
        w.u64(b.available);
        w.u64(b.locked);
    }
    for (const auto& m : markets) {
        auto it = books.find(m.name());
        static const Book kEmpty;
        const Book& book = it == books.end() ? kEmpty : it->second;
        for (const auto* ladder : {&book.bids, &book.asks}) {
            w.u32(uint32_t(ladder->size()));
            for (const auto& o : *ladder) {
                w.u64(o.order_id);
                w.str(o.account);
                w.u64(o.price);
                w.u64(o.remaining);
            }
        }
    }
    w.u64(next_order_id);
    w.u32(uint32_t(consumed_nonces.size()));
    for (uint64_t n : consumed_nonces) w.u64(n);
    w.u32(uint32_t(pending_withdrawals.size()));
    for (const auto& p : pending_withdrawals) {
        w.u64(p.id);
        w.str(p.account);
        w.str(p.token);
        w.u64(p.amount);
        w.u32(p.destination);
    }
    w.u64(next_withdrawal_id);
    return w.take();
}

SpotState SpotState::deserialize(const Bytes& b) {
    ByteReader r(b);
    SpotState s;
    uint32_t nm = r.u32();
    for (uint32_t i = 0; i < nm; ++i) {
        Market m;
        m.base = r.str();
        m.quote = r.str();
        s.markets.push_back(std::move(m));
    }
    uint32_t nb = r.u32();
    for (uint32_t i = 0; i < nb; ++i) {
        std::string account = r.str();
        std::string token = r.str();
        Balance bal;
        bal.available = r.u64();
        bal.locked = r.u64();
        s.balances[{std::move(account), std::move(token)}] = bal;
    }
    for (const auto& m : s.markets) {
        Book book;
        for (auto* ladder : {&book.bids, &book.asks}) {
            uint32_t n = r.u32();
            for (uint32_t i = 0; i < n; ++i) {
                Order o;
                o.order_id = r.u64();
                o.account = r.str();
                o.price = r.u64();
                o.remaining = r.u64();
                o.side = ladder == &book.bids ? Side::buy : Side::sell;
                ladder->push_back(std::move(o));
            }
        }
        if (!book.bids.empty() || !book.asks.empty()) s.books[m.name()] = std::move(book);
    }
    s.next_order_id = r.u64();
    uint32_t nn = r.u32();
    for (uint32_t i = 0; i < nn; ++i) s.consumed_nonces.insert(r.u64());
    uint32_t nw = r.u32();
    for (uint32_t i = 0; i < nw; ++i) {
        PendingWithdrawal p;
        p.id = r.u64();
        p.account = r.str();
        p.token = r.str();
        p.amount = r.u64();
        p.destination = r.u32();
        s.pending_withdrawals.push_back(std::move(p));
    }
    s.next_withdrawal_id = r.u64();
    if (!r.done()) throw Error(Errc::io, "trailing bytes in spot state");
    return s;
}

SpotState SpotState::genesis(std::vector<Market> markets) {
    SpotState s;
    s.markets = std::move(markets);
    return s;
}

Bytes encode_input(const SpotInput& in) {
    ByteWriter w;
    if (const auto* p = std::get_if<PlaceLimit>(&in)) {
        w.u8(0);
        w.str(p->account);
        w.str(p->market);
        w.u8(uint8_t(p->side));
        w.u64(p->price);
        w.u64(p->quantity);
    } else if (const auto* c = std::get_if<Cancel>(&in)) {
        w.u8(1);
        w.str(c->account);
        w.u64(c->order_id);
    } else if (const auto* d = std::get_if<DepositCredit>(&in)) {
        w.u8(2);
        w.str(d->account);
        w.str(d->token);
        w.u64(d->amount);
        w.u64(d->bridge_nonce);
    } else if (const auto* l = std::get_if<WithdrawLock>(&in)) {
        w.u8(3);
        w.str(l->account);
        w.str(l->token);
        w.u64(l->amount);
        w.u32(l->destination);
    } else {
        w.u8(4);
        w.u64(std::get<WithdrawFinalize>(in).withdrawal_id);
    }
    return w.take();
}

SpotInput decode_input(const Bytes& b) {
    ByteReader r(b);
    uint8_t tag = r.u8();
    switch (tag) {
        case 0: {
            PlaceLimit p;
            p.account = r.str();
            p.market = r.str();
            uint8_t side = r.u8();
            if (side > 1) throw Error(Errc::io, "bad side");
            p.side = Side(side);
            p.price = r.u64();
            p.quantity = r.u64();
            if (!r.done()) throw Error(Errc::io, "trailing input bytes");
            return p;
        }
        case 1: {
            Cancel c;
            c.account = r.str();
            c.order_id = r.u64();
            if (!r.done()) throw Error(Errc::io, "trailing input bytes");
            return c;
        }
        case 2: {
            DepositCredit d;
            d.account = r.str();
            d.token = r.str();
            d.amount = r.u64();
            d.bridge_nonce = r.u64();
            if (!r.done()) throw Error(Errc::io, "trailing input bytes");
            return d;
        }
        case 3: {
            WithdrawLock l;
            l.account = r.str();
            l.token = r.str();
            l.amount = r.u64();
            l.destination = r.u32();
            if (!r.done()) throw Error(Errc::io, "trailing input bytes");
            return l;
        }
        case 4: {
            WithdrawFinalize f;
            f.withdrawal_id = r.u64();
            if (!r.done()) throw Error(Errc::io, "trailing input bytes");
            return f;
        }
        default:
            throw Error(Errc::io, "unknown spot input tag");
    }
}

static const Market* find_market(const SpotState& s, const std::string& name) {
    for (const auto& m : s.markets)
        if (m.name() == name) return &m;
    return nullptr;
}

static void credit(SpotState& s, const std::string& account, const std::string& token,
                   uint64_t amount) {
    s.balances[{account, token}].available += amount;
}

// Inserts preserving price-time priority.
static void rest_order(std::vector<Order>& ladder, Order o, bool bids) {
    auto pos = std::find_if(ladder.begin(), ladder.end(), [&](const Order& r) {
        if (r.price != o.price) return bids ? r.price < o.price : r.price > o.price;
        return r.order_id > o.order_id;
    });
    ladder.insert(pos, std::move(o));
}

static std::optional<std::string> do_place_limit(SpotState& s, const PlaceLimit& in,
                                                 std::vector<TradeEvent>* trades) {
    const Market* mkt = find_market(s, in.market);
    if (!mkt) return "unknown market " + in.market;
    if (in.price == 0 || in.quantity == 0) return "price and quantity must be positive";
    if (mul_overflows(in.price, in.quantity)) return "order notional overflows";

    // Lock funds upfront: quote at the limit price for buys, base for sells.
    const std::string& lock_token = in.side == Side::buy ? mkt->quote : mkt->base;
    uint64_t lock_amount = in.side == Side::buy ? in.price * in.quantity : in.quantity;
    Balance& taker_bal = s.balances[{in.account, lock_token}];
    if (taker_bal.available < lock_amount) return "insufficient " + lock_token + " balance";
    taker_bal.available -= lock_amount;
    taker_bal.locked += lock_amount;

    Order taker;
    taker.order_id = s.next_order_id++;
    taker.account = in.account;
    taker.side = in.side;
    taker.price = in.price;
    taker.remaining = in.quantity;

    Book& book = s.books[in.market];
    std::vector<Order>& opposite = in.side == Side::buy ? book.asks : book.bids;
    while (taker.remaining > 0 && !opposite.empty()) {
        Order& maker = opposite.front();
        bool crosses = in.side == Side::buy ? maker.price <= taker.price
                                            : maker.price >= taker.price;
        if (!crosses) break;
        uint64_t qty = std::min(taker.remaining, maker.remaining);
        uint64_t px = maker.price;  // maker-price rule

        const Order& buyer = in.side == Side::buy ? taker : maker;
        const Order& seller = in.side == Side::buy ? maker : taker;
        uint64_t quote_paid = px * qty;
        uint64_t quote_reserved = buyer.price * qty;  // buyer locked at its own limit
        Balance& buyer_quote = s.balances[{buyer.account, mkt->quote}];
        buyer_quote.locked -= quote_reserved;
        buyer_quote.available += quote_reserved - quote_paid;
        credit(s, buyer.account, mkt->base, qty);
        Balance& seller_base = s.balances[{seller.account, mkt->base}];
        seller_base.locked -= qty;
        credit(s, seller.account, mkt->quote, quote_paid);

        if (trades) trades->push_back({maker.order_id, taker.order_id, px, qty});
        taker.remaining -= qty;
        maker.remaining -= qty;
        if (maker.remaining == 0) opposite.erase(opposite.begin());
    }
    if (taker.remaining > 0)
        rest_order(in.side == Side::buy ? book.bids : book.asks, taker, in.side == Side::buy);
    if (book.bids.empty() && book.asks.empty()) s.books.erase(in.market);
    return std::nullopt;
}

static std::optional<std::string> do_cancel(SpotState& s, const Cancel& in) {
    for (auto& [name_ref, book] : s.books) {
        const std::string name = name_ref;
        const Market* mkt = find_market(s, name);
        for (auto* ladder : {&book.bids, &book.asks}) {
            auto it = std::find_if(ladder->begin(), ladder->end(),
                                   [&](const Order& o) { return o.order_id == in.order_id; });
            if (it == ladder->end()) continue;
            if (it->account != in.account) return "order not owned by " + in.account;
            const std::string& lock_token = it->side == Side::buy ? mkt->quote : mkt->base;
            uint64_t unlock = it->side == Side::buy ? it->price * it->remaining : it->remaining;
            Balance& bal = s.balances[{it->account, lock_token}];
            bal.locked -= unlock;
            bal.available += unlock;
            ladder->erase(it);
            if (book.bids.empty() && book.asks.empty()) s.books.erase(name);
            return std::nullopt;
        }
    }
    return "unknown order";
}

static std::optional<std::string> do_deposit_credit(SpotState& s, const DepositCredit& in) {
    if (in.amount == 0) return "deposit amount must be positive";
    if (s.consumed_nonces.count(in.bridge_nonce)) return "duplicate bridge nonce";
    Balance& bal = s.balances[{in.account, in.token}];
    if (bal.available + in.amount < bal.available) return "balance overflow";
    s.consumed_nonces.insert(in.bridge_nonce);
    bal.available += in.amount;
    return std::nullopt;
}

static std::optional<std::string> do_withdraw_lock(SpotState& s, const WithdrawLock& in) {
    if (in.amount == 0) return "withdrawal amount must be positive";
    Balance& bal = s.balances[{in.account, in.token}];
    if (bal.available < in.amount) return "insufficient " + in.token + " balance";
    bal.available -= in.amount;
    bal.locked += in.amount;
    PendingWithdrawal p;
    p.id = s.next_withdrawal_id++;
    p.account = in.account;
    p.token = in.token;
    p.amount = in.amount;
    p.destination = in.destination;
    s.pending_withdrawals.push_back(std::move(p));
    return std::nullopt;
}

static std::optional<std::string> do_withdraw_finalize(SpotState& s, const WithdrawFinalize& in) {
    auto it = std::find_if(s.pending_withdrawals.begin(), s.pending_withdrawals.end(),
                           [&](const PendingWithdrawal& p) { return p.id == in.withdrawal_id; });
    if (it == s.pending_withdrawals.end()) return "unknown withdrawal id";
    Balance& bal = s.balances[{it->account, it->token}];
    bal.locked -= it->amount;  // the amount was moved to locked at lock time
    s.pending_withdrawals.erase(it);
    return std::nullopt;
}

std::optional<std::string> apply_input(SpotState& state, const SpotInput& in,
                                       std::vector<TradeEvent>* trades) {
    // Mutate a copy so a rejection leaves the caller's state untouched.
    SpotState next = state;
    std::optional<std::string> err;
    if (const auto* p = std::get_if<PlaceLimit>(&in))
        err = do_place_limit(next, *p, trades);
    else if (const auto* c = std::get_if<Cancel>(&in))
        err = do_cancel(next, *c);
    else if (const auto* d = std::get_if<DepositCredit>(&in))
        err = do_deposit_credit(next, *d);
    else if (const auto* l = std::get_if<WithdrawLock>(&in))
        err = do_withdraw_lock(next, *l);
    else
        err = do_withdraw_finalize(next, std::get<WithdrawFinalize>(in));
    if (err) return err;
    state = std::move(next);
    return std::nullopt;
}

ApplyOutcome SpotApp::apply(const Bytes& state, const Bytes& input) const {
    SpotState s;
    bool hit = false;
    {
        std::lock_guard lk(cache_mu_);
        if (cache_state_ && cache_bytes_ == state) {
            s = *cache_state_;
            hit = true;
        }
    }
    if (!hit) {
        try {
            s = SpotState::deserialize(state);
        } catch (const Error&) {
            return ApplyOutcome::reject("malformed spot state");
        }
    }
    SpotInput in;
    try {
        in = decode_input(input);
    } catch (const Error& e) {
        return ApplyOutcome::reject(std::string("malformed input: ") + e.what());
    }
    if (auto err = apply_input(s, in)) return ApplyOutcome::reject(*err);
    Bytes out = s.serialize();
    {
        std::lock_guard lk(cache_mu_);
        cache_bytes_ = out;
        cache_state_ = std::move(s);
    }
    return ApplyOutcome::ok(out);
}

}  // namespace chainless::spot
