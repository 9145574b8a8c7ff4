#pragma once

// Randomized differential checker. Each trial builds a small random history
// with a known disputed transfer, freezes it, and verifies the result
// against quantities recomputed from the raw spenditure records. A lifecycle
// phase then hammers the frozen state with valid and invalid operations.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rledger/freeze_engine.hpp"
#include "rledger/nft_ledger.hpp"

namespace rledger::oracle {

using json = nlohmann::json;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Options {
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    bool burns = false;              // add burns to every trial
    std::size_t max_addresses = 8;   // including the victim
    std::size_t max_transfers = 15;  // including the disputed one
    std::uint64_t max_amount = 100;
    std::size_t max_violations_listed = 20;
};

struct TrialOp {
    std::string op;  // mint | transfer | rtransfer | burn-nr | burn-r
    Address from;
    Address to;
    TokenAmount amount;
    BlockNumber block = 0;
    bool disputed = false;
};

enum class Shape { Random, Interleaved };

struct Trial {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    Shape shape = Shape::Random;
    bool burns = false;
    std::vector<TrialOp> ops;
    BlockNumber freeze_block = 0;

    std::string scenario() const {
        std::ostringstream os;
        os << "# oracle trial " << index << " seed " << seed << "\n";
        for (const auto& o : ops) {
            if (o.op == "mint") {
                os << "mint to=" << o.to << " amount=" << o.amount << " block=" << o.block;
            } else if (o.op == "burn-nr" || o.op == "burn-r") {
                os << "burn from=" << o.from << " amount=" << o.amount << " source=" << (o.op == "burn-r" ? "r" : "nr")
                   << " block=" << o.block;
            } else {
                os << o.op << " from=" << o.from << " to=" << o.to << " amount=" << o.amount << " block=" << o.block;
                if (o.disputed) os << " as=t0";
            }
            os << "\n";
        }
        os << "freeze ref=t0 as=c block=" << freeze_block << "\n";
        return os.str();
    }
};

struct CheckTally {
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
};

struct Violation {
    std::uint64_t trial = 0;
    std::string check;
    std::string detail;
    std::string scenario;
};

struct Report {
    Options options;
    std::uint64_t burn_trials = 0;
    std::uint64_t cyclic_trials = 0;
    std::uint64_t interleaved_trials = 0;
    std::uint64_t edges_checked = 0;
    std::map<std::string, CheckTally> checks;
    std::vector<Violation> violations;

    std::uint64_t violations_of(const std::string& name) const {
        auto it = checks.find(name);
        return it == checks.end() ? 0 : it->second.violations;
    }
    std::uint64_t obligation_bound_violations() const {
        return violations_of("obligation_bound_acyclic") + violations_of("obligation_bound_cyclic");
    }
    bool passed() const {
        for (const auto& [k, v] : checks)
            if (v.violations) return false;
        return true;
    }

    json to_json() const {
        json c = json::object();
        for (const auto& [k, v] : checks) c[k] = {{"checked", v.checked}, {"violations", v.violations}};
        json vs = json::array();
        for (const auto& v : violations)
            vs.push_back({{"trial", v.trial}, {"check", v.check}, {"detail", v.detail}, {"scenario", v.scenario}});
        return {{"seed", options.seed},
                {"trials", options.trials},
                {"burns", options.burns},
                {"burnTrials", burn_trials},
                {"cyclicTrials", cyclic_trials},
                {"interleavedTrials", interleaved_trials},
                {"edgesChecked", edges_checked},
                {"checks", c},
                {"violations", vs},
                {"passed", passed()}};
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "oracle seed=" << options.seed << " trials=" << options.trials << " burns=" << (options.burns ? "on" : "off")
           << " cyclic=" << cyclic_trials << " interleaved=" << interleaved_trials << ": "
           << (passed() ? "PASS" : "FAIL") << "\n";
        for (const auto& [k, v] : checks)
            os << "  " << k << ": " << v.checked << " checked, " << v.violations << " violations\n";
        for (const auto& v : violations)
            os << "violation in trial " << v.trial << " [" << v.check << "] " << v.detail << "\n" << v.scenario;
        return os.str();
    }
};

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : gen_() % n; }
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
    bool chance(unsigned percent) { return below(100) < percent; }

private:
    std::mt19937_64 gen_;
};

inline std::uint64_t small(TokenAmount a) { return static_cast<std::uint64_t>(a.value()); }

/// Builds the trial history on a live engine so every generated op is valid.
class TrialBuilder {
public:
    TrialBuilder(Trial& t, FreezeEngine& e, Rng& rng) : trial_(t), eng_(e), rng_(rng) {}

    BlockNumber block() const { return block_; }
    void tick() { block_ += rng_.below(3); }

    void mint(const Address& to, std::uint64_t amount) {
        eng_.ledger().mint(to, TokenAmount{amount}, block_);
        trial_.ops.push_back({"mint", to, to, TokenAmount{amount}, block_});
    }
    SpenditureRef transfer(const Address& from, const Address& to, std::uint64_t amount, bool disputed = false) {
        SpenditureRef r = eng_.ledger().transfer(from, to, TokenAmount{amount}, block_);
        trial_.ops.push_back({"transfer", from, to, TokenAmount{amount}, block_, disputed});
        ++transfers_;
        return r;
    }
    void rtransfer(const Address& from, const Address& to, std::uint64_t amount) {
        eng_.ledger().rtransfer(from, to, TokenAmount{amount}, block_);
        trial_.ops.push_back({"rtransfer", from, to, TokenAmount{amount}, block_});
        ++transfers_;
    }
    void burn(const Address& from, std::uint64_t amount, bool reversible) {
        eng_.ledger().burn(from, TokenAmount{amount}, block_,
                           reversible ? BurnSource::Reversible : BurnSource::NonReversible);
        trial_.ops.push_back({reversible ? "burn-r" : "burn-nr", from, from, TokenAmount{amount}, block_});
    }

    /// Random spend from `from`, reversible or not depending on what it holds.
    bool spend(const Address& from, const Address& to, std::uint64_t cap) {
        const AccountState s = eng_.ledger().account(from);
        const std::uint64_t r = std::min(small(s.available()), cap);
        const std::uint64_t nr = std::min(small(s.nrbalance), cap);
        if (r == 0 && nr == 0) return false;
        if (r > 0 && (nr == 0 || rng_.chance(75))) rtransfer(from, to, rng_.between(0, r));
        else transfer(from, to, rng_.between(0, nr));
        return true;
    }

    void maybe_burn(const std::vector<Address>& addrs) {
        const Address& a = addrs[rng_.below(addrs.size())];
        const AccountState s = eng_.ledger().account(a);
        if (rng_.chance(60) && !s.available().is_zero()) burn(a, rng_.between(1, std::min<std::uint64_t>(small(s.available()), 100)), true);
        else if (!s.nrbalance.is_zero()) burn(a, rng_.between(1, std::min<std::uint64_t>(small(s.nrbalance), 100)), false);
    }

    std::size_t transfers() const { return transfers_; }

private:
    Trial& trial_;
    FreezeEngine& eng_;
    Rng& rng_;
    BlockNumber block_ = 1;
    std::size_t transfers_ = 0;
};

struct BuiltTrial {
    Trial trial;
    FreezeEngine engine{Address{"gov"}};
    SpenditureRef disputed;
};

inline Address node_name(std::size_t i) { return Address{i == 0 ? "v" : "a" + std::to_string(i - 1)}; }

inline void build_trial(BuiltTrial& out, const Options& opt) {
    Trial& t = out.trial;
    Rng rng(t.seed);
    TrialBuilder b(t, out.engine, rng);
    const std::uint64_t cap = opt.max_amount;
    const std::size_t n = static_cast<std::size_t>(rng.between(3, std::max<std::size_t>(3, opt.max_addresses)));
    std::vector<Address> addrs;
    for (std::size_t i = 0; i < n; ++i) addrs.push_back(node_name(i));
    const Address v = addrs[0], a0 = addrs[1];

    // Prior holdings: non-reversible mints, and a few older transfers so
    // some addresses already hold reversible funds.
    const std::uint64_t s = rng.between(1, cap);
    b.mint(v, s + rng.below(cap));
    for (std::size_t i = 1; i < n; ++i)
        if (rng.chance(60)) b.mint(addrs[i], rng.between(1, cap));
    const std::size_t budget = static_cast<std::size_t>(rng.between(2, opt.max_transfers));
    const std::size_t pre = rng.below(std::min<std::size_t>(3, budget - 1));
    for (std::size_t i = 0; i < pre; ++i) {
        b.tick();
        const Address& from = addrs[rng.below(n)];
        b.spend(from, addrs[rng.below(n)], cap);
    }

    b.tick();
    if (out.engine.ledger().account(v).nrbalance < TokenAmount{s}) b.mint(v, s);
    out.disputed = b.transfer(v, a0, s, true);

    if (t.shape == Shape::Interleaved) {
        // a0 feeds a1 in several installments while a1 forwards funds to
        // fresh children between installments.
        const Address& hub = addrs[2];
        std::size_t child = 3;
        while (b.transfers() < budget) {
            b.tick();
            if (!b.spend(a0, hub, cap)) break;
            if (b.transfers() >= budget) break;
            b.tick();
            const Address& to = child < n ? addrs[child++] : addrs[rng.below(n)];
            b.spend(hub, to, cap);
            if (t.burns && rng.chance(30)) b.maybe_burn(addrs);
        }
    }
    std::size_t idle = 0;
    while (b.transfers() < budget && idle < 50) {
        b.tick();
        if (t.burns && rng.chance(20)) {
            b.maybe_burn(addrs);
            continue;
        }
        // Prefer senders that already hold disputed funds so the graph grows.
        const Address& from = rng.chance(70) ? addrs[1 + rng.below(n - 1)] : addrs[rng.below(n)];
        const Address& to = rng.chance(5) ? from : addrs[rng.below(n)];
        if (!b.spend(from, to, cap)) ++idle;
    }
    b.tick();
    t.freeze_block = b.block() + 1;
}

// ---------------------------------------------------------------------------
// Independent reference computation from raw records
// ---------------------------------------------------------------------------

struct RawRecord {
    SpenditureRef ref;
    Spenditure rec;
};

inline std::vector<RawRecord> raw_records(const Ledger& l) {
    std::vector<RawRecord> out;
    l.log().for_each([&](const SpenditureRef& r, const Spenditure& s) { out.push_back({r, s}); });
    std::sort(out.begin(), out.end(), [](const RawRecord& a, const RawRecord& b) { return a.rec.seq < b.rec.seq; });
    return out;
}

struct ReferenceResult {
    bool acyclic = true;
    std::map<Address, TokenAmount> to_freeze;
    std::map<std::string, TokenAmount> edge_ob;  // by ref string
    TokenAmount absorbed;
    TokenAmount unplaced;
};

/// Straightforward version of the freeze procedure over the raw record list:
/// one forward scan for reachability, a quadratic "all parents done" loop
/// for processing order.
inline ReferenceResult reference_freeze(const Ledger& l, const std::vector<RawRecord>& raw, const RawRecord& t0) {
    ReferenceResult res;
    const Address root = *t0.rec.to;
    std::map<Address, Seq> arrival{{root, t0.rec.seq}};
    std::map<Address, TokenAmount> burned;
    std::vector<const RawRecord*> edges;
    for (const auto& r : raw) {
        if (r.rec.seq <= t0.rec.seq) continue;
        auto it = arrival.find(r.ref.from);
        if (it == arrival.end() || r.rec.seq <= it->second) continue;
        if (r.rec.is_burn()) {
            burned[r.ref.from] += r.rec.amount;
            continue;
        }
        edges.push_back(&r);
        arrival.try_emplace(*r.rec.to, r.rec.seq);
    }

    // Cycle check by repeated leaf stripping.
    std::map<Address, std::size_t> indeg;
    for (const auto& [a, s] : arrival) indeg[a] = 0;
    for (const auto* e : edges) ++indeg[*e->rec.to];
    std::set<Address> done;
    std::vector<Address> order;
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& [a, d] : indeg) {
            if (done.contains(a) || d != 0) continue;
            done.insert(a);
            order.push_back(a);
            for (const auto* e : edges)
                if (e->ref.from == a) --indeg[*e->rec.to];
            progress = true;
            break;
        }
    }
    if (order.size() != arrival.size()) {
        res.acyclic = false;
        return res;
    }

    std::map<Address, TokenAmount> oblig;
    oblig[root] = t0.rec.amount;
    for (const auto& a : order) {
        TokenAmount rest = oblig[a];
        const TokenAmount f = min(rest, l.account(a).available());
        res.to_freeze[a] = f;
        rest -= f;
        const TokenAmount absorbed = min(rest, burned[a]);
        res.absorbed += absorbed;
        rest -= absorbed;
        for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
            const RawRecord& e = **it;
            if (e.ref.from != a) continue;
            const TokenAmount ob = min(rest, e.rec.amount);
            res.edge_ob[e.ref.to_string()] = ob;
            oblig[*e.rec.to] += ob;
            rest -= ob;
        }
        res.unplaced += rest;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Trial execution
// ---------------------------------------------------------------------------

class Checker {
public:
    Checker(Report& rep, const Trial& t, std::size_t max_listed) : rep_(rep), trial_(t), max_listed_(max_listed) {}

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        CheckTally& c = rep_.checks[name];
        ++c.checked;
        if (ok) return;
        ++c.violations;
        if (rep_.violations.size() < max_listed_) rep_.violations.push_back({trial_.index, name, detail, trial_.scenario()});
    }

private:
    Report& rep_;
    const Trial& trial_;
    std::size_t max_listed_;
};

inline std::string invariant_problem(const FreezeEngine& e) {
    const Ledger& l = e.ledger();
    TokenAmount sum;
    for (const auto& [a, s] : l.accounts()) {
        sum += s.total();
        if (s.frozen_total > s.rbalance) return a.id + " frozen above reversible balance";
        if (s.frozen_total != e.open_freezes_at(a)) return a.id + " frozen total disagrees with open claims";
    }
    if (sum != l.total_supply()) return "balances sum " + sum.to_string() + " != supply " + l.total_supply().to_string();
    if (l.total_supply() != l.total_minted() - l.total_burned()) return "supply != minted - burned";
    return "";
}

inline void run_freeze_checks(Report& rep, Checker& chk, BuiltTrial& bt) {
    FreezeEngine& eng = bt.engine;
    const std::vector<RawRecord> raw = raw_records(eng.ledger());
    const RawRecord* t0 = nullptr;
    for (const auto& r : raw)
        if (r.ref == bt.disputed) t0 = &r;
    const TokenAmount s = t0->rec.amount;
    const ReferenceResult ref = reference_freeze(eng.ledger(), raw, *t0);

    bool burned_after = false;
    for (const auto& r : raw)
        if (r.rec.seq > t0->rec.seq && r.rec.is_burn()) burned_after = true;
    if (burned_after) ++rep.burn_trials;
    if (!ref.acyclic) ++rep.cyclic_trials;

    const ClaimId id = eng.execute_freeze(eng.governance(), bt.disputed, bt.disputed.from, bt.trial.freeze_block);
    const FreezeAnalysis& an = eng.analysis(id);
    const FreezePlan& plan = an.plan;

    chk.check("accounting_identity", plan.total_frozen() + plan.total_absorbed() + plan.total_unplaced() == s,
              "frozen+absorbed+unplaced != s");
    chk.check("claim_matches_plan", eng.claim(id).total_frozen() == plan.total_frozen(), "claim total != plan total");
    if (!burned_after)
        chk.check("full_recovery_total", plan.total_frozen() == s,
                  "froze " + plan.total_frozen().to_string() + " of " + s.to_string());

    // Per-edge bound against obsum rebuilt from the raw records.
    std::map<std::string, const EdgeObligation*> by_ref;
    for (const auto& e : plan.per_edge) by_ref[e.ref.to_string()] = &e;
    auto ob_of = [&](const RawRecord& r) {
        auto it = by_ref.find(r.ref.to_string());
        return it == by_ref.end() ? TokenAmount{} : it->second->obligated;
    };
    const Address& root = *t0->rec.to;
    for (const auto& t : raw) {
        if (t.rec.seq <= t0->rec.seq || t.rec.is_burn()) continue;
        TokenAmount obsum = t.ref.from == root ? s : TokenAmount{};
        for (const auto& u : raw)
            if (u.rec.seq > t0->rec.seq && u.rec.seq < t.rec.seq && u.rec.to && *u.rec.to == t.ref.from)
                obsum += ob_of(u);
        const TokenAmount ob = ob_of(t);
        ++rep.edges_checked;
        if (!burned_after)
            chk.check(ref.acyclic ? "obligation_bound_acyclic" : "obligation_bound_cyclic", ob <= obsum,
                      t.ref.to_string() + " ob " + ob.to_string() + " > obsum " + obsum.to_string());
        chk.check("edge_value_bound", ob <= t.rec.amount, t.ref.to_string() + " ob above its value");
        if (auto it = by_ref.find(t.ref.to_string()); it != by_ref.end())
            chk.check("instrumented_obsum_agrees", it->second->prior_obligation == obsum,
                      t.ref.to_string() + " engine obsum " + it->second->prior_obligation.to_string() + " vs " +
                          obsum.to_string());
    }

    if (ref.acyclic) {
        bool same = true;
        std::string detail;
        for (const auto& n : plan.nodes) {
            auto it = ref.to_freeze.find(n.address);
            const TokenAmount want = it == ref.to_freeze.end() ? TokenAmount{} : it->second;
            if (want != n.frozen) {
                same = false;
                detail += n.address.id + " engine " + n.frozen.to_string() + " ref " + want.to_string() + "; ";
            }
        }
        for (const auto& [a, f] : ref.to_freeze)
            if (!f.is_zero() && !an.dag.find(a)) {
                same = false;
                detail += a.id + " missing from engine graph; ";
            }
        for (const auto& [r, ob] : ref.edge_ob)
            if ((by_ref.contains(r) ? by_ref[r]->obligated : TokenAmount{}) != ob) {
                same = false;
                detail += "edge " + r + " differs; ";
            }
        if (ref.absorbed != plan.total_absorbed() || ref.unplaced != plan.total_unplaced()) {
            same = false;
            detail += "absorbed/unplaced differ; ";
        }
        chk.check("reference_agrees", same, detail);
    }
    const std::string problem = invariant_problem(eng);
    chk.check("floor_and_conservation_after_freeze", problem.empty(), problem);
}

/// Random post-freeze activity: every failing op must leave the engine
/// untouched, invariants hold after every op, clean is idempotent.
inline void run_lifecycle(Checker& chk, BuiltTrial& bt) {
    FreezeEngine& eng = bt.engine;
    Rng rng(splitmix64(bt.trial.seed ^ 0xa5a5a5a5ULL));
    std::vector<Address> addrs;
    for (const auto& [a, s] : eng.ledger().accounts()) addrs.push_back(a);
    BlockNumber block = bt.trial.freeze_block;

    for (int step = 0; step < 12; ++step) {
        const FreezeEngine before = eng;
        const Address& a = addrs[rng.below(addrs.size())];
        const Address& b = addrs[rng.below(addrs.size())];
        const AccountState st = eng.ledger().account(a);
        bool threw = false;
        try {
            switch (rng.below(4)) {
                case 0: eng.ledger().rtransfer(a, b, TokenAmount{rng.below(small(st.rbalance) + 20)}, block); break;
                case 1: eng.ledger().transfer(a, b, TokenAmount{rng.below(small(st.nrbalance) + 20)}, block); break;
                case 2: eng.ledger().burn(a, TokenAmount{rng.below(small(st.rbalance) + 20)}, block, BurnSource::Reversible); break;
                default: eng.ledger().rtransfer(a, b, TokenAmount{1}, block > 0 ? block - 1 : 0); break;
            }
        } catch (const Error&) {
            threw = true;
        }
        if (threw) chk.check("atomic_failure", eng.same_state(before), "failed op changed state");
        const std::string problem = invariant_problem(eng);
        chk.check("invariants_during_lifecycle", problem.empty(), problem);
        block += rng.below(2);
    }

    const ClaimId id = eng.claims().begin()->first;
    switch (rng.below(3)) {
        case 0: eng.reverse(eng.governance(), id, block); break;
        case 1: eng.reject_reverse(eng.governance(), id, block); break;
        default: break;
    }
    {
        const std::string problem = invariant_problem(eng);
        chk.check("invariants_after_resolution", problem.empty(), problem);
    }

    block += eng.ledger().config().dispute_window + 1;
    std::vector<Address> senders;
    eng.ledger().log().for_each([&](const SpenditureRef& r, const Spenditure&) {
        if (std::find(senders.begin(), senders.end(), r.from) == senders.end()) senders.push_back(r.from);
    });
    const std::uint64_t last_epoch = eng.ledger().config().epoch_of(block);
    for (std::uint64_t e = 0; e <= last_epoch; ++e) eng.ledger().clean(e, senders, block);
    const FreezeEngine once = eng;
    TokenAmount matured;
    std::size_t removed = 0;
    for (std::uint64_t e = 0; e <= last_epoch; ++e) {
        CleanReport rep = eng.ledger().clean(e, senders, block);
        matured += rep.total_matured();
        removed += rep.total_removed();
    }
    chk.check("clean_idempotent", eng.same_state(once) && matured.is_zero() && removed == 0,
              "second clean changed state");
    const std::string problem = invariant_problem(eng);
    chk.check("invariants_after_clean", problem.empty(), problem);
}

/// NFT histories: every position freezable before a clean stays freezable.
inline void run_nft_trial(Checker& chk, std::uint64_t seed) {
    Rng rng(seed);
    NftLedger nft(Address{"gov"}, EpochConfig{1000, 100});
    const Address owners[] = {Address{"A"}, Address{"B"}, Address{"C"}, Address{"D"}};
    BlockNumber block = 1;
    std::vector<TokenId> ids;
    for (std::uint64_t t = 0; t < 1 + rng.below(3); ++t) {
        ids.push_back(Hash256::from_u128(t + 1));
        nft.mint(ids.back(), owners[0], block);
    }
    for (int step = 0; step < 10; ++step) {
        block += rng.below(60);
        const TokenId& id = ids[rng.below(ids.size())];
        const NftToken& tok = nft.token(id);
        if (tok.frozen) {
            nft.reject_reverse(nft.governance(), id, block);
        } else if (rng.chance(15) && tok.owners.size() > 1) {
            nft.freeze(nft.governance(), id, tok.end() - 2, block);
        } else {
            nft.transfer(id, tok.current_owner(), owners[rng.below(4)], block);
        }
    }
    block += rng.below(150);
    std::map<TokenId, std::vector<std::uint64_t>> freezable;
    for (const auto& id : ids) {
        const NftToken& t = nft.token(id);
        for (std::uint64_t i = t.head; i < t.end(); ++i)
            if (nft.can_freeze(id, i, block)) freezable[id].push_back(i);
    }
    nft.clean(ids, block);
    for (const auto& [id, positions] : freezable)
        for (auto i : positions)
            chk.check("nft_clean_keeps_freezable", nft.can_freeze(id, i, block),
                      "token " + id.hex() + " position " + std::to_string(i) + " lost by clean");
}

inline Report run(const Options& opt) {
    Report rep;
    rep.options = opt;
    for (std::uint64_t i = 0; i < opt.trials; ++i) {
        BuiltTrial bt;
        bt.trial.index = i;
        bt.trial.seed = splitmix64(opt.seed * 0x100000001b3ULL + i);
        bt.trial.burns = opt.burns;
        bt.trial.shape = i % 3 == 2 ? Shape::Interleaved : Shape::Random;
        if (bt.trial.shape == Shape::Interleaved) ++rep.interleaved_trials;
        build_trial(bt, opt);
        Checker chk(rep, bt.trial, opt.max_violations_listed);
        run_freeze_checks(rep, chk, bt);
        run_lifecycle(chk, bt);
        run_nft_trial(chk, splitmix64(bt.trial.seed + 17));
    }
    return rep;
}

}  // namespace rledger::oracle
