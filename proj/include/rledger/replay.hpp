#pragma once

// Executes parsed scenarios against a fresh engine and checks `expect` lines.

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rledger/freeze_engine.hpp"
#include "rledger/governance.hpp"
#include "rledger/nft_ledger.hpp"
#include "rledger/scenario.hpp"

namespace rledger::scenario {

using json = nlohmann::json;

struct Settings {
    EpochConfig epoch;
    Address governance{"gov"};
    FeePolicy fees;
    DisciplinePolicy discipline;
};

struct OpResult {
    int line = 0;
    std::string text;
    enum class Status { Ok, ExpectedError, Failed } status = Status::Ok;
    std::string error_kind;  // set when the op threw
    std::string message;
};

inline const char* to_string(OpResult::Status s) {
    switch (s) {
        case OpResult::Status::Ok: return "ok";
        case OpResult::Status::ExpectedError: return "expected-error";
        case OpResult::Status::Failed: return "failed";
    }
    return "?";
}

struct CheckResult {
    int line = 0;
    std::string text;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::string scenario;
    std::vector<OpResult> ops;
    std::vector<CheckResult> checks;
    json state;
    std::optional<double> wall_ms;

    std::size_t op_failures() const {
        std::size_t n = 0;
        for (const auto& o : ops) n += o.status == OpResult::Status::Failed;
        return n;
    }
    std::size_t check_failures() const {
        std::size_t n = 0;
        for (const auto& c : checks) n += !c.pass;
        return n;
    }
    bool passed() const { return op_failures() == 0 && check_failures() == 0; }
};

inline std::string amount_str(TokenAmount a) { return a.to_string(); }

/// Stateful interpreter. `apply` runs one op; engine errors propagate.
class Runner {
public:
    Runner() { rebuild(); }

    void apply(const ScenarioOp& op, std::vector<CheckResult>& checks) {
        if (op.op == "expect") {
            checks.push_back(check(op));
            return;
        }
        auto it = handlers().find(op.op);
        (this->*(it->second))(op);
        if (op.op != "config") touched_ = true;
    }

    const FreezeEngine& token() const { return *token_; }
    const NftLedger& nfts() const { return *nfts_; }
    const Governance& governance() const { return *gov_; }
    BlockNumber block() const { return block_; }

    json snapshot() const;

private:
    using Handler = void (Runner::*)(const ScenarioOp&);

    static const std::map<std::string, Handler>& handlers() {
        static const std::map<std::string, Handler> h = {
            {"config", &Runner::op_config},
            {"judge", &Runner::op_judge},
            {"judges", &Runner::op_judges},
            {"advanceBlock", &Runner::op_advance},
            {"mint", &Runner::op_mint},
            {"transfer", &Runner::op_transfer},
            {"rtransfer", &Runner::op_transfer},
            {"burn", &Runner::op_burn},
            {"clean", &Runner::op_clean},
            {"freeze", &Runner::op_freeze},
            {"reverse", &Runner::op_reverse},
            {"rejectReverse", &Runner::op_reject},
            {"nftMint", &Runner::op_nft_mint},
            {"nftTransfer", &Runner::op_nft_transfer},
            {"nftClean", &Runner::op_nft_clean},
            {"nftFreeze", &Runner::op_nft_freeze},
            {"nftReverse", &Runner::op_nft_reverse},
            {"nftRejectReverse", &Runner::op_nft_reject},
            {"submitFreeze", &Runner::op_submit},
            {"commit", &Runner::op_commit},
            {"reveal", &Runner::op_reveal},
            {"tally", &Runner::op_tally},
            {"discipline", &Runner::op_discipline},
        };
        return h;
    }

    void rebuild() {
        gov_.reset();
        token_ = std::make_unique<FreezeEngine>(settings_.governance, settings_.epoch);
        nfts_ = std::make_unique<NftLedger>(settings_.governance, settings_.epoch);
        gov_ = std::make_unique<Governance>(*token_, *nfts_, settings_.fees, settings_.discipline);
    }

    // -- parameter access (values were validated by the parser) --
    static TokenAmount amount(const ScenarioOp& op, const std::string& k) { return *TokenAmount::parse(op.raw(k)); }
    static std::uint64_t uint(const ScenarioOp& op, const std::string& k) { return *parse_uint(op.raw(k)); }
    static Address addr(const ScenarioOp& op, const std::string& k) { return Address{op.raw(k)}; }
    static Hash256 hash(const ScenarioOp& op, const std::string& k) { return *Hash256::parse(op.raw(k)); }
    static bool boolean(const ScenarioOp& op, const std::string& k) { return op.raw(k) == "true"; }

    BlockNumber block_of(const ScenarioOp& op) const { return op.has("block") ? uint(op, "block") : block_; }
    void advance(BlockNumber b) { block_ = std::max(block_, b); }
    Address caller_of(const ScenarioOp& op) const {
        return op.has("caller") ? addr(op, "caller") : settings_.governance;
    }

    const SpenditureRef& ref_named(const std::string& name) const {
        auto it = refs_.find(name);
        if (it == refs_.end()) throw UnknownSpenditureError("no transfer named '" + name + "'");
        return it->second;
    }
    const ClaimId& claim_named(const std::string& name) const {
        auto it = claims_.find(name);
        if (it == claims_.end()) throw UnknownClaimError("no claim named '" + name + "'");
        return it->second;
    }
    CaseId case_named(const std::string& name) const {
        auto it = cases_.find(name);
        if (it == cases_.end()) throw UnknownCaseError("no case named '" + name + "'");
        return it->second;
    }
    Address judge_of(const ScenarioOp& op, CaseId id) const {
        const std::string& j = op.raw("judge");
        if (j[0] != '#') return Address{j};
        const auto k = *parse_uint(std::string_view(j).substr(1));
        const Case& c = gov_->get(id);
        if (k >= c.quorum.size())
            throw NotQuorumMemberError("quorum of case " + std::to_string(id) + " has " +
                                       std::to_string(c.quorum.size()) + " members, no " + j);
        return c.quorum[k];
    }
    std::string claim_name_for(const ScenarioOp& op) const {
        return op.has("as") ? op.raw("as") : "claim" + std::to_string(claims_.size() + 1);
    }

    // -- ops --
    void op_config(const ScenarioOp& op) {
        if (touched_) throw ConfigError("config must come before any other operation");
        Settings s = settings_;
        if (op.has("delta")) s.epoch.delta = uint(op, "delta");
        if (op.has("window")) s.epoch.dispute_window = uint(op, "window");
        if (op.has("governance")) s.governance = addr(op, "governance");
        if (op.has("judgeFee")) s.fees.judge_fee = amount(op, "judgeFee");
        if (op.has("minStake")) s.fees.min_stake = amount(op, "minStake");
        if (op.has("n")) s.fees.quorum_size = uint(op, "n");
        if (op.has("freezeThreshold")) s.fees.freeze_threshold = uint(op, "freezeThreshold");
        if (op.has("trialThreshold")) s.fees.trial_threshold = uint(op, "trialThreshold");
        if (op.has("revealDeadline")) s.fees.reveal_deadline = uint(op, "revealDeadline");
        if (op.has("tipPolicy"))
            s.fees.tip_policy = op.raw("tipPolicy") == "burn" ? TipPolicy::Burn : TipPolicy::PrevailingParty;
        if (op.has("strikeLimit")) s.discipline.strike_limit = static_cast<std::uint32_t>(uint(op, "strikeLimit"));
        if (op.has("minorityRatio")) s.discipline.minority_ratio = *parse_real(op.raw("minorityRatio"));
        if (op.has("minVotes")) s.discipline.min_votes = static_cast<std::uint32_t>(uint(op, "minVotes"));
        if (op.has("minorityShare")) s.discipline.extreme_minority_share = *parse_real(op.raw("minorityShare"));
        if (op.has("quorumSteps")) {
            s.fees.quorum_steps.clear();
            for (const auto& item : split_list(op.raw("quorumSteps"))) {
                const auto colon = item.find(':');
                s.fees.quorum_steps.emplace_back(*TokenAmount::parse(std::string_view(item).substr(0, colon)),
                                                 *parse_uint(std::string_view(item).substr(colon + 1)));
            }
        }
        s.epoch.validate();
        s.fees.validate();
        settings_ = s;
        rebuild();
    }

    void op_judge(const ScenarioOp& op) { gov_->add_judge(addr(op, "id")); }
    void op_judges(const ScenarioOp& op) {
        for (std::uint64_t i = 0; i < uint(op, "count"); ++i)
            gov_->add_judge(Address{op.raw("prefix") + std::to_string(i)});
    }

    void op_advance(const ScenarioOp& op) {
        const BlockNumber target = op.has("to") ? uint(op, "to") : block_ + uint(op, "by");
        if (target < block_)
            throw BlockRegressionError("block " + std::to_string(target) + " is before current block " +
                                       std::to_string(block_));
        block_ = target;
    }

    void op_mint(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        token_->ledger().mint(addr(op, "to"), amount(op, "amount"), b);
        advance(b);
    }

    void op_transfer(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        Ledger& l = token_->ledger();
        const SpenditureRef ref = op.op == "transfer" ? l.transfer(addr(op, "from"), addr(op, "to"), amount(op, "amount"), b)
                                                      : l.rtransfer(addr(op, "from"), addr(op, "to"), amount(op, "amount"), b);
        if (op.has("as")) refs_.insert_or_assign(op.raw("as"), ref);
        advance(b);
    }

    void op_burn(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        const BurnSource src =
            op.has("source") && op.raw("source") == "r" ? BurnSource::Reversible : BurnSource::NonReversible;
        auto ref = token_->ledger().burn(addr(op, "from"), amount(op, "amount"), b, src);
        if (ref && op.has("as")) refs_.insert_or_assign(op.raw("as"), *ref);
        advance(b);
    }

    void op_clean(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        std::vector<Address> senders;
        for (const auto& s : split_list(op.raw("senders"))) senders.emplace_back(s);
        token_->ledger().clean(uint(op, "epoch"), senders, b);
        advance(b);
    }

    void op_freeze(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        const SpenditureRef& ref = ref_named(op.raw("ref"));
        const Address victim = op.has("victim") ? addr(op, "victim") : ref.from;
        const std::string name = claim_name_for(op);
        const ClaimId id = token_->execute_freeze(caller_of(op), ref, victim, b);
        claims_.insert_or_assign(name, id);
        advance(b);
    }

    void op_reverse(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        token_->reverse(caller_of(op), claim_named(op.raw("claim")), b);
        advance(b);
    }

    void op_reject(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        token_->reject_reverse(caller_of(op), claim_named(op.raw("claim")), b);
        advance(b);
    }

    void op_nft_mint(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        nfts_->mint(hash(op, "token"), addr(op, "to"), b);
        advance(b);
    }

    void op_nft_transfer(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        nfts_->transfer(hash(op, "token"), addr(op, "from"), addr(op, "to"), b);
        advance(b);
    }

    void op_nft_clean(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        std::vector<TokenId> ids;
        for (const auto& s : split_list(op.raw("tokens"))) ids.push_back(*Hash256::parse(s));
        nfts_->clean(ids, b);
        advance(b);
    }

    void op_nft_freeze(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        const bool ok = nfts_->freeze(caller_of(op), hash(op, "token"), uint(op, "index"), b);
        advance(b);
        const bool want = op.has("result") ? boolean(op, "result") : true;
        if (ok != want)
            throw FrozenAssetError(std::string("nftFreeze returned ") + (ok ? "true" : "false") + ", expected " +
                                   (want ? "true" : "false"));
    }

    void op_nft_reverse(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        nfts_->reverse(caller_of(op), hash(op, "token"), uint(op, "index"), b);
        advance(b);
    }

    void op_nft_reject(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        nfts_->reject_reverse(caller_of(op), hash(op, "token"), b);
        advance(b);
    }

    void op_submit(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        CaseTarget target;
        if (op.has("ref")) target = ref_named(op.raw("ref"));
        else target = NftTarget{hash(op, "token"), uint(op, "index")};
        const TokenAmount tip = op.has("tip") ? amount(op, "tip") : TokenAmount{};
        const std::string evidence = op.has("evidence") ? op.raw("evidence") : "";
        const CaseId id =
            gov_->submit_freeze_request(addr(op, "claimant"), target, amount(op, "stake"), tip, evidence,
                                        hash(op, "seed"), b);
        cases_.insert_or_assign(op.has("as") ? op.raw("as") : "case" + std::to_string(id), id);
        advance(b);
    }

    void op_commit(const ScenarioOp& op) {
        const CaseId id = case_named(op.raw("case"));
        const Address judge = judge_of(op, id);
        const Hash256 commitment =
            op.has("hash") ? hash(op, "hash")
                           : vote_commitment(op.raw("vote") == "approve" ? Vote::Approve : Vote::Reject,
                                             hash(op, "salt"), id);
        gov_->commit(id, judge, commitment);
    }

    void op_reveal(const ScenarioOp& op) {
        const CaseId id = case_named(op.raw("case"));
        gov_->reveal(id, judge_of(op, id), op.raw("vote") == "approve" ? Vote::Approve : Vote::Reject,
                     hash(op, "salt"));
    }

    void op_tally(const ScenarioOp& op) {
        const BlockNumber b = block_of(op);
        const std::string& name = op.raw("case");
        const PhaseOutcome out = gov_->tally(case_named(name), b);
        if (out.claim) claims_.insert_or_assign(name, *out.claim);
        advance(b);
    }

    void op_discipline(const ScenarioOp&) { gov_->discipline_judges(); }

    // -- expectations --
    CheckResult check(const ScenarioOp& op) const {
        CheckResult r;
        r.line = op.line;
        r.text = op.text();
        std::vector<std::string> problems;
        auto cmp = [&](const std::string& what, const std::string& expected, const std::string& actual) {
            if (expected != actual) problems.push_back(what + ": expected " + expected + ", got " + actual);
        };
        auto cmp_amount = [&](const std::string& key, TokenAmount actual, const std::string& label = "") {
            if (op.has(key)) cmp(label.empty() ? key : label, op.raw(key), actual.to_string());
        };
        try {
            const Ledger& l = token_->ledger();
            const std::string& k = op.kind;
            if (k == "balance") {
                const AccountState a = l.account(addr(op, "addr"));
                cmp_amount("r", a.rbalance);
                cmp_amount("nr", a.nrbalance);
                cmp_amount("frozen", a.frozen_total);
                cmp_amount("available", a.available());
            } else if (k == "supply") {
                cmp_amount("value", l.total_supply(), "supply");
            } else if (k == "conservation") {
                TokenAmount sum;
                for (const auto& [a, s] : l.accounts()) sum += s.total();
                cmp("sum of balances", l.total_supply().to_string(), sum.to_string());
                cmp("minted - burned", l.total_supply().to_string(), (l.total_minted() - l.total_burned()).to_string());
            } else if (k == "frozenFloor") {
                for (const auto& [a, s] : l.accounts()) {
                    if (s.frozen_total > s.rbalance)
                        problems.push_back(a.id + " frozen " + s.frozen_total.to_string() + " > reversible " +
                                           s.rbalance.to_string());
                    if (s.frozen_total != token_->open_freezes_at(a))
                        problems.push_back(a.id + " frozen " + s.frozen_total.to_string() + " != open claims " +
                                           token_->open_freezes_at(a).to_string());
                }
            } else if (k == "toFreeze") {
                const Claim& c = token_->claim(claim_named(op.raw("claim")));
                for (const auto& [key, p] : op.params) {
                    if (key == "claim" || key == "expectError") continue;
                    TokenAmount got;
                    for (const auto& e : c.entries)
                        if (e.address.id == key) got += e.amount;
                    cmp(key, p.value, got.to_string());
                }
            } else if (k == "claimTotal") {
                cmp_amount("value", token_->claim(claim_named(op.raw("claim"))).total_frozen(), "total");
            } else if (k == "claimStatus") {
                cmp("status", op.raw("status"), rledger::to_string(token_->claim(claim_named(op.raw("claim"))).status));
            } else if (k == "obligation") {
                const auto& plan = token_->analysis(claim_named(op.raw("claim"))).plan;
                const auto obl = plan.obligations();
                auto it = obl.find(addr(op, "addr"));
                cmp("obligation of " + op.raw("addr"), op.raw("value"),
                    (it == obl.end() ? TokenAmount{} : it->second).to_string());
            } else if (k == "edge") {
                const auto& an = token_->analysis(claim_named(op.raw("claim")));
                const Address from = addr(op, "from"), to = addr(op, "to");
                TokenAmount value, ob;
                std::size_t found = 0;
                for (const auto& e : an.dag.edges)
                    if (an.dag.nodes[e.src] == from && an.dag.nodes[e.dst] == to) {
                        value += e.value;
                        ++found;
                    }
                for (const auto& e : an.plan.per_edge)
                    if (e.from == from && e.to == to) ob += e.obligated;
                if (found == 0) problems.push_back("no edge " + from.id + "->" + to.id);
                else {
                    cmp_amount("value", value);
                    cmp_amount("ob", ob);
                }
            } else if (k == "edgeCount") {
                cmp("edges", op.raw("value"),
                    std::to_string(token_->analysis(claim_named(op.raw("claim"))).dag.edges.size()));
            } else if (k == "absorbed") {
                cmp_amount("value", token_->analysis(claim_named(op.raw("claim"))).plan.total_absorbed(), "absorbed");
            } else if (k == "unplaced") {
                cmp_amount("value", token_->analysis(claim_named(op.raw("claim"))).plan.total_unplaced(), "unplaced");
            } else if (k == "spenditure") {
                const Spenditure* s = l.log().find(ref_named(op.raw("ref")));
                if (op.has("exists")) cmp("exists", op.raw("exists"), s ? "true" : "false");
                if (op.has("amount")) {
                    if (!s) problems.push_back("record " + op.raw("ref") + " no longer exists");
                    else cmp_amount("amount", s->amount);
                }
            } else if (k == "phase") {
                cmp("phase", op.raw("phase"), rledger::to_string(gov_->get(case_named(op.raw("case"))).phase));
            } else if (k == "escrow") {
                const EscrowBook& e = gov_->get(case_named(op.raw("case"))).escrow;
                cmp_amount("fees", e.judge_fees);
                cmp_amount("burned", e.burned);
                cmp_amount("returned", e.returned_to_claimant);
                cmp_amount("defendant", e.paid_to_defendant);
                cmp_amount("held", e.held());
            } else if (k == "quorum") {
                cmp("size", op.raw("size"), std::to_string(gov_->get(case_named(op.raw("case"))).quorum.size()));
            } else if (k == "owner") {
                cmp("owner", op.raw("addr"), nfts_->token(hash(op, "token")).current_owner().id);
            } else if (k == "tokenFrozen") {
                cmp("frozen", op.raw("value"), nfts_->token(hash(op, "token")).frozen ? "true" : "false");
            } else if (k == "owners") {
                const NftToken& t = nfts_->token(hash(op, "token"));
                if (op.has("count")) cmp("count", op.raw("count"), std::to_string(t.owners.size()));
                if (op.has("head")) cmp("head", op.raw("head"), std::to_string(t.head));
            } else if (k == "inPool") {
                cmp("inPool", op.raw("value"), gov_->pool().contains(addr(op, "judge")) ? "true" : "false");
            } else if (k == "strikes") {
                const auto& recs = gov_->judge_records();
                auto it = recs.find(addr(op, "judge"));
                cmp("strikes", op.raw("value"), std::to_string(it == recs.end() ? 0 : it->second.strikes));
            }
        } catch (const Error& e) {
            problems.push_back(e.what());
        }
        r.pass = problems.empty();
        for (std::size_t i = 0; i < problems.size(); ++i) r.detail += (i ? "; " : "") + problems[i];
        return r;
    }

    Settings settings_;
    std::unique_ptr<FreezeEngine> token_;
    std::unique_ptr<NftLedger> nfts_;
    std::unique_ptr<Governance> gov_;
    std::map<std::string, SpenditureRef> refs_;
    std::map<std::string, ClaimId> claims_;
    std::map<std::string, CaseId> cases_;
    BlockNumber block_ = 0;
    bool touched_ = false;

    friend json claims_json(const Runner&);
};

// ---------------------------------------------------------------------------
// JSON snapshot
// ---------------------------------------------------------------------------

inline json graph_json(const TransferGraph& g) {
    json nodes = json::array();
    for (std::size_t i = 0; i < g.size(); ++i)
        nodes.push_back({{"address", g.nodes[i].id},
                         {"available", amount_str(g.available[i])},
                         {"burnedAt", amount_str(g.burned_at[i])},
                         {"arrivalSeq", g.arrival[i]}});
    json edges = json::array();
    for (const auto& e : g.edges)
        edges.push_back({{"from", g.nodes[e.src].id},
                         {"to", g.nodes[e.dst].id},
                         {"value", amount_str(e.value)},
                         {"seq", e.seq},
                         {"ref", e.ref.to_string()}});
    return {{"nodes", nodes}, {"edges", edges}};
}

inline json plan_json(const FreezePlan& p) {
    json nodes = json::array();
    for (const auto& n : p.nodes)
        nodes.push_back({{"address", n.address.id},
                         {"obligation", amount_str(n.obligation)},
                         {"frozen", amount_str(n.frozen)},
                         {"absorbedByBurn", amount_str(n.absorbed_by_burn)},
                         {"unplaced", amount_str(n.unplaced)}});
    json edges = json::array();
    for (const auto& e : p.per_edge)
        edges.push_back({{"ref", e.ref.to_string()},
                         {"from", e.from.id},
                         {"to", e.to.id},
                         {"seq", e.seq},
                         {"value", amount_str(e.value)},
                         {"obligated", amount_str(e.obligated)},
                         {"priorObligation", amount_str(e.prior_obligation)}});
    return {{"disputedValue", amount_str(p.disputed_value)},
            {"nodes", nodes},
            {"edges", edges},
            {"totalFrozen", amount_str(p.total_frozen())},
            {"totalAbsorbed", amount_str(p.total_absorbed())},
            {"totalUnplaced", amount_str(p.total_unplaced())},
            {"stats",
             {{"nodesVisited", p.stats.nodes_visited},
              {"edgesTouched", p.stats.edges_touched},
              {"sortTouches", p.stats.sort_touches}}}};
}

inline json claims_json(const Runner& r) {
    json out = json::object();
    for (const auto& [name, id] : r.claims_) {
        const Claim& c = r.token().claim(id);
        const FreezeAnalysis& an = r.token().analysis(id);
        json entries = json::object();
        for (const auto& e : c.entries) entries[e.address.id] = amount_str(e.amount);
        json debits = json::array();
        for (const auto& d : c.debits) debits.push_back({{"ref", d.ref.to_string()}, {"amount", amount_str(d.amount)}});
        json cancelled = json::array();
        for (const auto& cc : an.cancelled) {
            json reduced = json::array();
            for (const auto& ref : cc.reduced) reduced.push_back(ref.to_string());
            cancelled.push_back({{"removed", cc.removed.to_string()}, {"amount", amount_str(cc.amount)}, {"reduced", reduced}});
        }
        out[name] = {{"id", c.id.hex()},
                     {"victim", c.victim.id},
                     {"disputed", c.disputed.to_string()},
                     {"disputedValue", amount_str(c.disputed_value)},
                     {"status", rledger::to_string(c.status)},
                     {"frozenAt", c.frozen_at},
                     {"toFreeze", entries},
                     {"debits", debits},
                     {"graph", graph_json(an.graph)},
                     {"dag", graph_json(an.dag)},
                     {"cancelledCycles", cancelled},
                     {"plan", plan_json(an.plan)}};
    }
    return out;
}

inline json Runner::snapshot() const {
    const Ledger& l = token_->ledger();
    json accounts = json::object();
    for (const auto& [a, s] : l.accounts())
        accounts[a.id] = {{"r", amount_str(s.rbalance)},
                          {"nr", amount_str(s.nrbalance)},
                          {"frozen", amount_str(s.frozen_total)}};

    json cases = json::object();
    for (const auto& [name, id] : cases_) {
        const Case& c = gov_->get(id);
        json quorum = json::array();
        for (const auto& j : c.quorum) quorum.push_back(j.id);
        json history = json::array();
        for (const auto& h : c.history)
            history.push_back({{"from", rledger::to_string(h.from)},
                               {"to", rledger::to_string(h.to)},
                               {"approvals", h.approvals},
                               {"rejections", h.rejections},
                               {"abstentions", h.abstentions},
                               {"needed", h.needed},
                               {"note", h.note}});
        cases[name] = {{"id", c.id},
                       {"kind", c.kind == CaseKind::Fungible ? "fungible" : "nft"},
                       {"claimant", c.claimant.id},
                       {"defendant", c.defendant.id},
                       {"disputedValue", amount_str(c.disputed_value)},
                       {"stake", amount_str(c.stake)},
                       {"tip", amount_str(c.tip)},
                       {"evidence", c.evidence},
                       {"phase", rledger::to_string(c.phase)},
                       {"quorum", quorum},
                       {"history", history},
                       {"escrow",
                        {{"deposited", amount_str(c.escrow.deposited)},
                         {"judgeFees", amount_str(c.escrow.judge_fees)},
                         {"burned", amount_str(c.escrow.burned)},
                         {"returnedToClaimant", amount_str(c.escrow.returned_to_claimant)},
                         {"paidToDefendant", amount_str(c.escrow.paid_to_defendant)},
                         {"held", amount_str(c.escrow.held())}}}};
    }

    json nfts = json::object();
    for (const auto& [id, t] : nfts_->tokens()) {
        json owners = json::array();
        for (const auto& o : t.owners) owners.push_back({{"owner", o.owner.id}, {"block", o.block}});
        nfts[id.hex()] = {{"head", t.head}, {"frozen", t.frozen}, {"owners", owners}};
    }

    json judges = json::object();
    for (const auto& [j, rec] : gov_->judge_records())
        judges[j.id] = {{"inPool", gov_->pool().contains(j)},
                        {"strikes", rec.strikes},
                        {"votes", rec.votes},
                        {"minorityVotes", rec.minority_votes}};

    return {{"block", block_},
            {"accounts", accounts},
            {"supply",
             {{"total", amount_str(l.total_supply())},
              {"minted", amount_str(l.total_minted())},
              {"burned", amount_str(l.total_burned())}}},
            {"liveSpenditures", l.log().live_records()},
            {"claims", claims_json(*this)},
            {"cases", cases},
            {"nfts", nfts},
            {"judges", judges}};
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

struct ReplayOptions {
    bool wall_time = false;
};

/// Runs every op in order. Engine errors become failed ops unless the op
/// carries a matching expectError; replay continues after a failure.
inline RunReport replay(const std::vector<ScenarioOp>& ops, const std::string& name, ReplayOptions opts = {}) {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.scenario = name;
    Runner runner;
    for (const auto& op : ops) {
        OpResult r;
        r.line = op.line;
        r.text = op.text();
        const std::optional<std::string> expected =
            op.has("expectError") ? std::optional<std::string>(op.raw("expectError")) : std::nullopt;
        try {
            runner.apply(op, report.checks);
            if (expected) {
                r.status = OpResult::Status::Failed;
                r.message = "expected " + *expected + " but the operation succeeded";
            }
        } catch (const Error& e) {
            r.error_kind = std::string(e.kind());
            r.message = e.what();
            r.status = expected && *expected == r.error_kind ? OpResult::Status::ExpectedError
                                                             : OpResult::Status::Failed;
        }
        if (op.op != "expect") report.ops.push_back(std::move(r));
    }
    report.state = runner.snapshot();
    if (opts.wall_time)
        report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

inline RunReport replay_file(const std::string& path, ReplayOptions opts = {}) {
    return replay(parse_scenario(path), path, opts);
}

inline json to_json(const RunReport& r) {
    json ops = json::array();
    for (const auto& o : r.ops) {
        json j = {{"line", o.line}, {"op", o.text}, {"status", to_string(o.status)}};
        if (!o.error_kind.empty()) j["error"] = o.error_kind;
        if (!o.message.empty()) j["message"] = o.message;
        ops.push_back(std::move(j));
    }
    json checks = json::array();
    for (const auto& c : r.checks) {
        json j = {{"line", c.line}, {"expect", c.text}, {"pass", c.pass}};
        if (!c.detail.empty()) j["detail"] = c.detail;
        checks.push_back(std::move(j));
    }
    json out = {{"scenario", r.scenario},
                {"passed", r.passed()},
                {"summary",
                 {{"ops", r.ops.size()},
                  {"opFailures", r.op_failures()},
                  {"checks", r.checks.size()},
                  {"checkFailures", r.check_failures()}}},
                {"ops", ops},
                {"checks", checks},
                {"state", r.state}};
    if (r.wall_ms) out["wallTimeMs"] = *r.wall_ms;
    return out;
}

inline std::string to_text(const RunReport& r) {
    std::ostringstream os;
    os << "scenario " << r.scenario << ": " << (r.passed() ? "PASS" : "FAIL") << " (" << r.ops.size() << " ops, "
       << r.op_failures() << " failed; " << r.checks.size() << " checks, " << r.check_failures() << " failed)\n";
    for (const auto& o : r.ops)
        if (o.status == OpResult::Status::Failed)
            os << "  op line " << o.line << " FAILED: " << o.text << "\n    " << o.message << "\n";
    for (const auto& c : r.checks)
        os << "  " << (c.pass ? "ok  " : "FAIL") << " line " << c.line << ": " << c.text
           << (c.detail.empty() ? "" : "\n        " + c.detail) << "\n";

    const json& st = r.state;
    os << "block " << st["block"].get<std::uint64_t>() << ", supply " << st["supply"]["total"].get<std::string>()
       << " (minted " << st["supply"]["minted"].get<std::string>() << ", burned "
       << st["supply"]["burned"].get<std::string>() << ")\n";
    os << "accounts:\n";
    for (const auto& [a, s] : st["accounts"].items())
        os << "  " << a << " r=" << s["r"].get<std::string>() << " nr=" << s["nr"].get<std::string>()
           << " frozen=" << s["frozen"].get<std::string>() << "\n";
    for (const auto& [name, c] : st["claims"].items()) {
        os << "claim " << name << " " << c["status"].get<std::string>() << " disputed " << c["disputed"].get<std::string>()
           << " value " << c["disputedValue"].get<std::string>() << "\n";
        for (const auto& [a, v] : c["toFreeze"].items()) os << "  freeze " << a << " " << v.get<std::string>() << "\n";
        const json& plan = c["plan"];
        os << "  stats nodes=" << plan["stats"]["nodesVisited"] << " edges=" << plan["stats"]["edgesTouched"]
           << " absorbed=" << plan["totalAbsorbed"].get<std::string>()
           << " unplaced=" << plan["totalUnplaced"].get<std::string>() << "\n";
    }
    for (const auto& [name, c] : st["cases"].items())
        os << "case " << name << " " << c["phase"].get<std::string>() << " escrow held "
           << c["escrow"]["held"].get<std::string>() << "\n";
    if (r.wall_ms) os << "wall time " << *r.wall_ms << " ms\n";
    return os.str();
}

}  // namespace rledger::scenario
