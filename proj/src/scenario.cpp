#include "chainless/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace chainless::scen {

const AppSpec* Scenario::find_app(const std::string& id) const {
    for (const auto& a : apps)
        if (a.id == id) return &a;
    return nullptr;
}

namespace {

[[noreturn]] void fail(size_t line, const std::string& msg) {
    throw Error(Errc::config, "line " + std::to_string(line) + ": " + msg);
}

uint64_t parse_u64(const std::string& tok, size_t line) {
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        fail(line, "expected a number, got '" + tok + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

// "key=value" option on an app declaration
std::pair<std::string, std::string> split_opt(const std::string& tok, size_t line) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) fail(line, "expected key=value, got '" + tok + "'");
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

spot::Market parse_market(const std::string& s, size_t line) {
    auto slash = s.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == s.size())
        fail(line, "market must be BASE/QUOTE, got '" + s + "'");
    return {s.substr(0, slash), s.substr(slash + 1)};
}

struct Parser {
    Scenario out;
    bool seen_seed = false;
    Tick last_tick = 0;

    bool has_chain(agg::ChainId c) const {
        for (auto id : out.chains)
            if (id == c) return true;
        return false;
    }

    const AppSpec& need_app(const std::string& id, size_t line) {
        const AppSpec* a = out.find_app(id);
        if (!a) fail(line, "app '" + id + "' is not declared");
        return *a;
    }

    agg::ChainId need_chain(const std::string& tok, size_t line) {
        auto c = agg::ChainId(parse_u64(tok, line));
        if (!has_chain(c)) fail(line, "chain " + tok + " is not declared");
        return c;
    }

    void app_decl(const std::vector<std::string>& toks, size_t line) {
        if (toks.size() < 3) fail(line, "app needs an id and at least chain=");
        AppSpec spec;
        spec.id = toks[1];
        if (out.find_app(spec.id)) fail(line, "app '" + spec.id + "' declared twice");
        bool have_chain = false;
        for (size_t i = 2; i < toks.size(); ++i) {
            auto [key, value] = split_opt(toks[i], line);
            if (key == "kind") {
                if (value != "counter" && value != "zkspot")
                    fail(line, "kind must be counter or zkspot");
                spec.kind = value;
            } else if (key == "chain") {
                spec.chain = need_chain(value, line);
                have_chain = true;
            } else if (key == "markets") {
                std::istringstream ms(value);
                std::string m;
                while (std::getline(ms, m, ','))
                    spec.markets.push_back(parse_market(m, line));
            } else if (key == "mu") {
                spec.mu = parse_u64(value, line);
                if (spec.mu == 0) fail(line, "mu must be positive");
            } else if (key == "nu") {
                spec.nu = parse_u64(value, line);
                if (spec.nu == 0) fail(line, "nu must be positive");
            } else if (key == "trust") {
                auto model = trust::TrustModel::parse(value);
                if (!model) fail(line, "unknown trust model '" + value + "'");
                spec.trust = *model;
            } else if (key == "da") {
                if (value == "public")
                    spec.da = da::DaMode::public_full;
                else if (value == "private")
                    spec.da = da::DaMode::private_commitment;
                else
                    fail(line, "da must be public or private");
            } else if (key == "fault") {
                spec.fault = parse_fault(value, line);
            } else if (key == "byzantine") {
                spec.byzantine = uint32_t(parse_u64(value, line));
            } else if (key == "challenger") {
                if (value != "on" && value != "off") fail(line, "challenger must be on or off");
                spec.challenger = value == "on";
            } else {
                fail(line, "unknown app option '" + key + "'");
            }
        }
        if (!have_chain) fail(line, "app '" + spec.id + "' needs chain=");
        if (spec.kind == "zkspot" && spec.markets.empty())
            fail(line, "zkspot app needs markets=");
        out.apps.push_back(std::move(spec));
    }

    FaultPolicy parse_fault(const std::string& value, size_t line) {
        auto colon = value.find(':');
        std::string mode = colon == std::string::npos ? value : value.substr(0, colon);
        auto m = fault_mode_from_name(mode);
        if (!m) fail(line, "unknown fault mode '" + mode + "'");
        FaultPolicy p;
        p.mode = *m;
        if (colon != std::string::npos) p.trigger_block = parse_u64(value.substr(colon + 1), line);
        return p;
    }

    void action(const std::vector<std::string>& toks, size_t line) {
        if (toks.size() < 3) fail(line, "at needs a tick and an action");
        Action a;
        a.tick = parse_u64(toks[1], line);
        if (a.tick < last_tick) fail(line, "schedule ticks must be nondecreasing");
        last_tick = a.tick;
        const std::string& verb = toks[2];
        auto arity = [&](size_t n, const char* usage) {
            if (toks.size() != n) fail(line, std::string("usage: at T ") + usage);
        };
        if (verb == "input") {
            arity(5, "input <app> <base64>");
            a.kind = ActionKind::raw_input;
            a.app = need_app(toks[3], line).id;
            auto payload = base64_decode(toks[4]);
            if (!payload) fail(line, "bad base64 payload");
            a.payload = *payload;
        } else if (verb == "place") {
            arity(9, "place <app> <account> <buy|sell> <market> <price> <qty>");
            a.kind = ActionKind::place;
            const auto& app = need_app(toks[3], line);
            if (app.kind != "zkspot") fail(line, "place targets a zkspot app");
            a.app = app.id;
            a.account = toks[4];
            if (toks[5] == "buy")
                a.side = spot::Side::buy;
            else if (toks[5] == "sell")
                a.side = spot::Side::sell;
            else
                fail(line, "side must be buy or sell");
            a.market = toks[6];
            a.price = parse_u64(toks[7], line);
            a.amount = parse_u64(toks[8], line);
        } else if (verb == "cancel") {
            arity(6, "cancel <app> <account> <order_id>");
            a.kind = ActionKind::cancel;
            a.app = need_app(toks[3], line).id;
            a.account = toks[4];
            a.order_id = parse_u64(toks[5], line);
        } else if (verb == "withdraw") {
            arity(8, "withdraw <app> <account> <token> <amount> <dest_chain>");
            a.kind = ActionKind::withdraw;
            a.app = need_app(toks[3], line).id;
            a.account = toks[4];
            a.token = toks[5];
            a.amount = parse_u64(toks[6], line);
            a.destination = need_chain(toks[7], line);
        } else if (verb == "deposit") {
            arity(8, "deposit <origin_chain> <app> <account> <token> <amount>");
            a.kind = ActionKind::deposit;
            a.origin = need_chain(toks[3], line);
            a.app = need_app(toks[4], line).id;
            a.account = toks[5];
            a.token = toks[6];
            a.amount = parse_u64(toks[7], line);
        } else if (verb == "forge_claim") {
            arity(7, "forge_claim <origin_chain> <dest_chain> <token> <amount>");
            a.kind = ActionKind::forge_claim;
            a.origin = need_chain(toks[3], line);
            a.destination = need_chain(toks[4], line);
            a.token = toks[5];
            a.amount = parse_u64(toks[6], line);
        } else if (verb == "fault") {
            arity(6, "fault <app> <mode> <trigger_block>");
            a.kind = ActionKind::inject_fault;
            a.app = need_app(toks[3], line).id;
            a.fault = parse_fault(toks[4] + ":" + toks[5], line);
        } else if (verb == "settle") {
            arity(3, "settle");
            a.kind = ActionKind::settle;
        } else if (verb == "claim") {
            arity(3, "claim");
            a.kind = ActionKind::claim_all;
        } else {
            fail(line, "unknown action '" + verb + "'");
        }
        out.actions.push_back(std::move(a));
    }

    void expectation(const std::vector<std::string>& toks, size_t line) {
        if (toks.size() < 2) fail(line, "expect needs a check name");
        Expectation e;
        std::string joined;
        for (size_t i = 1; i < toks.size(); ++i) joined += (i > 1 ? " " : "") + toks[i];
        e.name = joined;
        const std::string& what = toks[1];
        auto arity = [&](size_t n, const char* usage) {
            if (toks.size() != n) fail(line, std::string("usage: expect ") + usage);
        };
        if (what == "verdict") {
            arity(5, "verdict <app> <block_no> <accepted|rejected|pending>");
            e.kind = ExpectKind::verdict;
            e.app = need_app(toks[2], line).id;
            e.block_no = parse_u64(toks[3], line);
            if (toks[4] == "accepted")
                e.verdict = trust::Verdict::accepted;
            else if (toks[4] == "rejected")
                e.verdict = trust::Verdict::rejected;
            else if (toks[4] == "pending")
                e.verdict = trust::Verdict::pending;
            else
                fail(line, "verdict must be accepted, rejected, or pending");
        } else if (what == "chain_balance") {
            arity(6, "chain_balance <chain> <account> <token> <amount>");
            e.kind = ExpectKind::chain_balance;
            e.chain = need_chain(toks[2], line);
            e.account = toks[3];
            e.token = toks[4];
            e.amount = parse_u64(toks[5], line);
        } else if (what == "app_available" || what == "app_locked") {
            arity(6, "app_available|app_locked <app> <account> <token> <amount>");
            e.kind = what == "app_available" ? ExpectKind::app_available : ExpectKind::app_locked;
            e.app = need_app(toks[2], line).id;
            e.account = toks[3];
            e.token = toks[4];
            e.amount = parse_u64(toks[5], line);
        } else if (what == "conservation") {
            arity(2, "conservation");
            e.kind = ExpectKind::conservation;
        } else if (what == "premature_claims") {
            arity(3, "premature_claims <count>");
            e.kind = ExpectKind::premature_claims;
            e.amount = parse_u64(toks[2], line);
        } else if (what == "pessimistic_denials") {
            arity(3, "pessimistic_denials <count>");
            e.kind = ExpectKind::pessimistic_denials;
            e.amount = parse_u64(toks[2], line);
        } else if (what == "rejected_blocks") {
            arity(4, "rejected_blocks <app> <count>");
            e.kind = ExpectKind::rejected_blocks;
            e.app = need_app(toks[2], line).id;
            e.amount = parse_u64(toks[3], line);
        } else if (what == "settled_epochs") {
            arity(3, "settled_epochs <count>");
            e.kind = ExpectKind::settled_epochs;
            e.amount = parse_u64(toks[2], line);
        } else {
            fail(line, "unknown expectation '" + what + "'");
        }
        out.expectations.push_back(std::move(e));
    }
};

}  // namespace

Scenario parse_scenario(const std::string& text) {
    Parser p;
    std::istringstream in(text);
    std::string raw;
    size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        auto toks = split_ws(raw);
        if (toks.empty()) continue;
        const std::string& kw = toks[0];
        if (kw == "seed") {
            if (toks.size() != 2) fail(line_no, "usage: seed <u64>");
            p.out.seed = parse_u64(toks[1], line_no);
            p.seen_seed = true;
        } else if (kw == "chain") {
            if (toks.size() != 2) fail(line_no, "usage: chain <id>");
            auto c = agg::ChainId(parse_u64(toks[1], line_no));
            if (p.has_chain(c)) fail(line_no, "chain declared twice");
            p.out.chains.push_back(c);
        } else if (kw == "fund") {
            if (toks.size() != 5) fail(line_no, "usage: fund <chain> <account> <token> <amount>");
            FundDecl f;
            f.chain = p.need_chain(toks[1], line_no);
            f.account = toks[2];
            f.token = toks[3];
            f.amount = parse_u64(toks[4], line_no);
            p.out.funds.push_back(std::move(f));
        } else if (kw == "app") {
            p.app_decl(toks, line_no);
        } else if (kw == "run_until") {
            if (toks.size() != 2) fail(line_no, "usage: run_until <tick>");
            p.out.run_until = parse_u64(toks[1], line_no);
        } else if (kw == "at") {
            p.action(toks, line_no);
        } else if (kw == "expect") {
            p.expectation(toks, line_no);
        } else {
            fail(line_no, "unknown directive '" + kw + "'");
        }
    }
    if (p.out.chains.empty()) fail(line_no, "scenario declares no chains");
    if (p.out.apps.empty()) fail(line_no, "scenario declares no apps");
    if (p.out.run_until < p.last_tick) fail(line_no, "run_until precedes the last scheduled tick");
    return p.out;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::config, "cannot open scenario file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace chainless::scen
