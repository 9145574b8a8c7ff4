#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iterator>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rledger/errors.hpp"
#include "rledger/ledger.hpp"
#include "rledger/sha256.hpp"
#include "rledger/spenditure_log.hpp"
#include "rledger/types.hpp"

namespace rledger {

// ---------------------------------------------------------------------------
// Transfer graph
// ---------------------------------------------------------------------------

struct GraphEdge {
    std::size_t src = 0;
    std::size_t dst = 0;
    TokenAmount value;
    Seq seq = 0;
    SpenditureRef ref;

    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Transfers that carried disputed funds away from the root after the
/// disputed transaction. Node 0 is the root. Each node's outgoing edges are
/// stored most-recent-first, which is the order the obligation loop needs.
struct TransferGraph {
    std::vector<Address> nodes;
    std::vector<TokenAmount> available;  // Bal(a) snapshot at build time
    std::vector<TokenAmount> burned_at;
    std::vector<Seq> arrival;  // seq of the first transfer that reached the node
    std::vector<GraphEdge> edges;

    const Address& root() const { return nodes.front(); }
    std::size_t size() const { return nodes.size(); }

    std::size_t add_node(const Address& a, TokenAmount bal, Seq arrived) {
        auto [it, inserted] = index_.try_emplace(a, nodes.size());
        if (inserted) {
            nodes.push_back(a);
            available.push_back(bal);
            burned_at.emplace_back();
            arrival.push_back(arrived);
        }
        return it->second;
    }

    std::optional<std::size_t> find(const Address& a) const {
        auto it = index_.find(a);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    friend bool operator==(const TransferGraph&, const TransferGraph&) = default;

private:
    std::unordered_map<Address, std::size_t> index_;
};

/// Builds the graph rooted at the recipient of `disputed`, using only
/// records with seq < `freeze_seq`. An outgoing record of node b is included
/// only if it was posted after disputed funds first reached b, so every
/// edge lies on a path of transfers that all happened after the disputed
/// one, in order. Reversible burns at a node after that point accumulate
/// into its burned_at.
inline TransferGraph build_graph(const Ledger& ledger, const SpenditureRef& disputed, Seq freeze_seq) {
    const SpenditureLog& log = ledger.log();
    const Spenditure& t0 = log.resolve(disputed);
    if (t0.is_burn()) throw UnknownSpenditureError("disputed record " + disputed.to_string() + " is a burn");

    TransferGraph g;
    g.add_node(*t0.to, ledger.available_rbalance(*t0.to), t0.seq);

    // Earliest-arrival search: a node's outgoing records are read once, after
    // its arrival seq is final.
    using Item = std::pair<Seq, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
    std::vector<bool> done;
    frontier.emplace(t0.seq, 0);
    while (!frontier.empty()) {
        auto [arrived, node] = frontier.top();
        frontier.pop();
        if (done.size() <= node) done.resize(node + 1, false);
        if (done[node] || arrived != g.arrival[node]) continue;
        done[node] = true;
        const Address sender = g.nodes[node];
        log.for_each_outgoing_desc(sender, arrived, freeze_seq, [&](const SpenditureRef& ref, const Spenditure& s) {
            if (s.is_burn()) {
                g.burned_at[node] += s.amount;
                return;
            }
            const std::size_t before = g.size();
            const std::size_t dst = g.add_node(*s.to, ledger.available_rbalance(*s.to), s.seq);
            // A finalized node always has arrival < s.seq, so it is never re-queued.
            if (dst == before) {
                frontier.emplace(s.seq, dst);
            } else if (s.seq < g.arrival[dst]) {
                g.arrival[dst] = s.seq;
                frontier.emplace(s.seq, dst);
            }
            g.edges.push_back(GraphEdge{node, dst, s.amount, s.seq, ref});
        });
    }
    return g;
}

// ---------------------------------------------------------------------------
// Cycle elimination
// ---------------------------------------------------------------------------

struct CycleCancellation {
    SpenditureRef removed;
    TokenAmount amount;
    std::vector<SpenditureRef> reduced;
};

/// Repeatedly finds a directed cycle, deletes its minimum-value edge (ties:
/// lowest seq) and subtracts that value from the cycle's other edges, until
/// the graph is acyclic. One cycle is cancelled per DFS pass, so adversarial
/// inputs cost O(E * (V + E)).
inline TransferGraph eliminate_cycles(TransferGraph g, std::vector<CycleCancellation>* trace = nullptr) {
    const std::size_t n = g.size();
    std::vector<bool> alive(g.edges.size(), true);
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t e = 0; e < g.edges.size(); ++e) out[g.edges[e].src].push_back(e);

    enum : std::uint8_t { White, Gray, Black };
    auto find_cycle = [&]() -> std::vector<std::size_t> {
        std::vector<std::uint8_t> color(n, White);
        std::vector<std::size_t> parent_edge(n, 0);
        std::vector<std::pair<std::size_t, std::size_t>> stack;  // (node, next out position)
        for (std::size_t start = 0; start < n; ++start) {
            if (color[start] != White) continue;
            stack.emplace_back(start, 0);
            color[start] = Gray;
            while (!stack.empty()) {
                auto& [u, pos] = stack.back();
                if (pos == out[u].size()) {
                    color[u] = Black;
                    stack.pop_back();
                    continue;
                }
                const std::size_t e = out[u][pos++];
                if (!alive[e]) continue;
                const std::size_t v = g.edges[e].dst;
                if (color[v] == Gray) {
                    std::vector<std::size_t> cycle{e};
                    for (std::size_t w = u; w != v; w = g.edges[parent_edge[w]].src) cycle.push_back(parent_edge[w]);
                    return cycle;
                }
                if (color[v] == White) {
                    color[v] = Gray;
                    parent_edge[v] = e;
                    stack.emplace_back(v, 0);
                }
            }
        }
        return {};
    };

    for (auto cycle = find_cycle(); !cycle.empty(); cycle = find_cycle()) {
        std::size_t victim = cycle.front();
        for (std::size_t e : cycle) {
            const auto& c = g.edges[e];
            const auto& m = g.edges[victim];
            if (c.value < m.value || (c.value == m.value && c.seq < m.seq)) victim = e;
        }
        const TokenAmount d = g.edges[victim].value;
        alive[victim] = false;
        CycleCancellation record{g.edges[victim].ref, d, {}};
        for (std::size_t e : cycle) {
            if (e == victim) continue;
            g.edges[e].value -= d;
            record.reduced.push_back(g.edges[e].ref);
        }
        if (trace) trace->push_back(std::move(record));
    }

    std::vector<GraphEdge> kept;
    kept.reserve(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (alive[e]) kept.push_back(g.edges[e]);
    g.edges = std::move(kept);
    return g;
}

// ---------------------------------------------------------------------------
// Obligation propagation
// ---------------------------------------------------------------------------

struct EdgeObligation {
    std::size_t edge = 0;  // index into the graph's edges
    SpenditureRef ref;
    Address from;
    Address to;
    Seq seq = 0;
    TokenAmount value;      // val(t) in the processed graph
    TokenAmount obligated;  // ob(to, t)
    TokenAmount prior_obligation;  // obsum(from, t); filled when instrumented

    friend bool operator==(const EdgeObligation&, const EdgeObligation&) = default;
};

struct NodeOutcome {
    Address address;
    TokenAmount obligation;  // oblig(a)
    TokenAmount frozen;      // toFreeze(a)
    TokenAmount absorbed_by_burn;
    TokenAmount unplaced;  // excess obligation left when out-edges ran out

    friend bool operator==(const NodeOutcome&, const NodeOutcome&) = default;
};

struct FreezeStats {
    std::size_t nodes_visited = 0;
    std::size_t edges_touched = 0;  // edges examined by the obligation loop
    std::size_t sort_touches = 0;   // nodes + edges touched by the topological sort

    friend bool operator==(const FreezeStats&, const FreezeStats&) = default;
};

struct FreezePlan {
    TokenAmount disputed_value;
    std::vector<NodeOutcome> nodes;  // topological processing order
    std::vector<EdgeObligation> per_edge;
    FreezeStats stats;

    std::map<Address, TokenAmount> to_freeze() const {
        std::map<Address, TokenAmount> m;
        for (const auto& n : nodes) m[n.address] = n.frozen;
        return m;
    }
    std::map<Address, TokenAmount> obligations() const {
        std::map<Address, TokenAmount> m;
        for (const auto& n : nodes) m[n.address] = n.obligation;
        return m;
    }
    TokenAmount total_frozen() const {
        TokenAmount t;
        for (const auto& n : nodes) t += n.frozen;
        return t;
    }
    TokenAmount total_absorbed() const {
        TokenAmount t;
        for (const auto& n : nodes) t += n.absorbed_by_burn;
        return t;
    }
    TokenAmount total_unplaced() const {
        TokenAmount t;
        for (const auto& n : nodes) t += n.unplaced;
        return t;
    }

    friend bool operator==(const FreezePlan&, const FreezePlan&) = default;
};

struct CalcOptions {
    bool instrument = false;  // compute obsum(from, t) for every touched edge
};

/// Topological order of the nodes reachable from the root. Throws
/// std::logic_error if the reachable part still contains a cycle.
inline std::vector<std::size_t> topological_order(const TransferGraph& g,
                                                  const std::vector<std::size_t>& offsets,
                                                  const std::vector<std::size_t>& adj, std::size_t& touches) {
    const std::size_t n = g.size();
    std::vector<bool> reach(n, false);
    std::vector<std::size_t> stack{0};
    reach[0] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        ++touches;
        for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) {
            const std::size_t v = g.edges[adj[i]].dst;
            if (!reach[v]) {
                reach[v] = true;
                stack.push_back(v);
            }
        }
    }
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& e : g.edges)
        if (reach[e.src]) ++indegree[e.dst];
    std::vector<std::size_t> order;
    std::vector<std::size_t> ready;
    if (indegree[0] == 0) ready.push_back(0);
    while (!ready.empty()) {
        const std::size_t u = ready.back();
        ready.pop_back();
        order.push_back(u);
        for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) {
            ++touches;
            const std::size_t v = g.edges[adj[i]].dst;
            if (--indegree[v] == 0) ready.push_back(v);
        }
    }
    std::size_t reachable = 0;
    for (bool r : reach) reachable += r ? 1 : 0;
    if (order.size() != reachable) throw std::logic_error("transfer graph has a cycle; eliminate cycles first");
    return order;
}

/// Obligation propagation over a DAG. Each node freezes as much of its
/// obligation as its available reversible balance allows, drops what it
/// burned, and pushes the rest onto its outgoing transfers from the most
/// recent backwards, never more than a transfer's value.
inline FreezePlan calc_freeze(const TransferGraph& g, TokenAmount disputed_value, CalcOptions opts = {}) {
    FreezePlan plan;
    plan.disputed_value = disputed_value;
    const std::size_t n = g.size();
    if (n == 0) return plan;

    // CSR adjacency, each slice most-recent-first.
    std::vector<std::size_t> offsets(n + 1, 0);
    for (const auto& e : g.edges) ++offsets[e.src + 1];
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    std::vector<std::size_t> adj(g.edges.size());
    {
        std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
        for (std::size_t e = 0; e < g.edges.size(); ++e) adj[fill[g.edges[e].src]++] = e;
    }
    auto by_recency = [&](std::size_t a, std::size_t b) { return g.edges[a].seq > g.edges[b].seq; };
    for (std::size_t u = 0; u < n; ++u) {
        auto first = adj.begin() + static_cast<std::ptrdiff_t>(offsets[u]);
        auto last = adj.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]);
        if (!std::is_sorted(first, last, by_recency)) std::stable_sort(first, last, by_recency);
    }

    const std::vector<std::size_t> order = topological_order(g, offsets, adj, plan.stats.sort_touches);

    std::vector<TokenAmount> oblig(n);
    oblig[0] = disputed_value;
    // (seq, ob) of obligations arriving at each node; only kept when instrumented.
    std::vector<std::vector<std::pair<Seq, TokenAmount>>> incoming;
    if (opts.instrument) incoming.resize(n);

    plan.nodes.reserve(order.size());
    for (std::size_t a : order) {
        ++plan.stats.nodes_visited;
        NodeOutcome out;
        out.address = g.nodes[a];
        const TokenAmount tau = oblig[a];
        out.obligation = tau;
        out.frozen = min(tau, g.available[a]);
        TokenAmount rest = tau - out.frozen;
        out.absorbed_by_burn = min(rest, g.burned_at[a]);
        rest -= out.absorbed_by_burn;

        if (!rest.is_zero()) {
            std::vector<std::pair<Seq, TokenAmount>> prefix;  // ascending seq, running sum
            if (opts.instrument) {
                auto& in = incoming[a];
                std::sort(in.begin(), in.end());
                TokenAmount running = a == 0 ? disputed_value : TokenAmount{};
                prefix.reserve(in.size());
                for (auto [seq, ob] : in) {
                    running += ob;
                    prefix.emplace_back(seq, running);
                }
            }
            for (std::size_t i = offsets[a]; i < offsets[a + 1] && !rest.is_zero(); ++i) {
                ++plan.stats.edges_touched;
                const GraphEdge& e = g.edges[adj[i]];
                const TokenAmount ob = min(rest, e.value);
                oblig[e.dst] += ob;
                rest -= ob;
                EdgeObligation rec{adj[i], e.ref, g.nodes[e.src], g.nodes[e.dst], e.seq, e.value, ob, {}};
                if (opts.instrument) {
                    auto it = std::lower_bound(prefix.begin(), prefix.end(), e.seq,
                                               [](const auto& p, Seq s) { return p.first < s; });
                    rec.prior_obligation = it == prefix.begin() ? (a == 0 ? disputed_value : TokenAmount{})
                                                                : std::prev(it)->second;
                    incoming[e.dst].emplace_back(e.seq, ob);
                }
                plan.per_edge.push_back(std::move(rec));
            }
        }
        out.unplaced = rest;
        plan.nodes.push_back(std::move(out));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Claims
// ---------------------------------------------------------------------------

enum class ClaimStatus { Frozen, Reversed, Rejected };

inline const char* to_string(ClaimStatus s) {
    switch (s) {
        case ClaimStatus::Frozen: return "frozen";
        case ClaimStatus::Reversed: return "reversed";
        case ClaimStatus::Rejected: return "rejected";
    }
    return "?";
}

struct FreezeEntry {
    Address address;
    TokenAmount amount;
    friend bool operator==(const FreezeEntry&, const FreezeEntry&) = default;
};

/// Obligation passed along a logged spend; subtracted from its remaining
/// amount while the claim is open.
struct EdgeDebit {
    SpenditureRef ref;
    TokenAmount amount;
    friend bool operator==(const EdgeDebit&, const EdgeDebit&) = default;
};

struct Claim {
    ClaimId id;
    Address victim;
    SpenditureRef disputed;
    TokenAmount disputed_value;
    BlockNumber frozen_at = 0;
    std::vector<FreezeEntry> entries;
    std::vector<EdgeDebit> debits;
    ClaimStatus status = ClaimStatus::Frozen;

    TokenAmount total_frozen() const {
        TokenAmount t;
        for (const auto& e : entries) t += e.amount;
        return t;
    }

    friend bool operator==(const Claim&, const Claim&) = default;
};

/// Everything computed for one freeze, kept for reporting.
struct FreezeAnalysis {
    TransferGraph graph;
    TransferGraph dag;
    std::vector<CycleCancellation> cancelled;
    FreezePlan plan;
};

/// Share of a claim to move back to the victim. Only the full share is
/// supported.
struct ReversalShare {
    std::uint64_t numerator = 1;
    std::uint64_t denominator = 1;
    bool full() const { return numerator == denominator && denominator != 0; }
};

/// Owns the fungible ledger and the claims recorded against it. Freeze,
/// reverse and rejectReverse are restricted to the governance address fixed
/// at construction.
class FreezeEngine {
public:
    explicit FreezeEngine(Address governance, EpochConfig cfg = {})
        : ledger_(cfg), governance_(std::move(governance)) {}

    Ledger& ledger() { return ledger_; }
    const Ledger& ledger() const { return ledger_; }
    const Address& governance() const { return governance_; }

    /// Read-only dry run of the freeze pipeline against the current state.
    FreezeAnalysis analyze(const SpenditureRef& disputed, CalcOptions opts = {}) const {
        FreezeAnalysis out;
        const Spenditure& t0 = ledger_.log().resolve(disputed);
        out.graph = build_graph(ledger_, disputed, ledger_.log().next_seq());
        out.dag = eliminate_cycles(out.graph, &out.cancelled);
        out.plan = calc_freeze(out.dag, t0.amount, opts);
        return out;
    }

    ClaimId execute_freeze(const Address& caller, const SpenditureRef& disputed, const Address& victim,
                           BlockNumber current) {
        require_governance(caller);
        const Spenditure& t0 = ledger_.log().resolve(disputed);
        if (t0.is_burn()) throw UnknownSpenditureError("disputed record " + disputed.to_string() + " is a burn");
        if (victim != disputed.from)
            throw NotAffectedPartyError(victim.id + " is not the sender of " + disputed.to_string());
        if (current < ledger_.current_block())
            throw BlockRegressionError("freeze at block " + std::to_string(current) + " is before current block " +
                                       std::to_string(ledger_.current_block()));
        if (current < t0.block || current - t0.block > ledger_.config().dispute_window)
            throw WindowElapsedError("disputed transfer at block " + std::to_string(t0.block) +
                                     " is outside the dispute window at block " + std::to_string(current));

        FreezeAnalysis analysis = analyze(disputed, CalcOptions{true});
        const FreezePlan& plan = analysis.plan;

        Claim claim;
        claim.victim = victim;
        claim.disputed = disputed;
        claim.disputed_value = t0.amount;
        claim.frozen_at = current;
        for (const auto& node : plan.nodes)
            if (!node.frozen.is_zero()) claim.entries.push_back({node.address, node.frozen});
        if (!t0.amount.is_zero()) claim.debits.push_back({disputed, t0.amount});
        for (const auto& e : plan.per_edge)
            if (!e.obligated.is_zero()) claim.debits.push_back({e.ref, e.obligated});
        claim.id = next_claim_id(disputed, current);

        // Nothing below can fail: each freeze fits in the available balance
        // and each debit is bounded by the record's remaining amount.
        ledger_.block_ = current;
        for (const auto& entry : claim.entries) ledger_.mutable_account(entry.address).frozen_total += entry.amount;
        for (const auto& d : claim.debits) ledger_.log_.debit(d.ref, d.amount);
        ClaimId id = claim.id;
        claims_.emplace(id, std::move(claim));
        analyses_.emplace(id, std::move(analysis));
        return id;
    }

    /// Moves every frozen amount of the claim to the victim's reversible
    /// balance and logs it as a spend from the claim's synthetic sender.
    void reverse(const Address& caller, const ClaimId& id, BlockNumber current, ReversalShare share = {}) {
        require_governance(caller);
        if (!share.full()) throw ConfigError("partial reversal is not supported");
        Claim& claim = open_claim(id);
        if (current < ledger_.current_block())
            throw BlockRegressionError("reverse at block " + std::to_string(current) + " is before current block " +
                                       std::to_string(ledger_.current_block()));

        std::map<Address, AccountState> touched;
        auto slot = [&](const Address& a) -> AccountState& {
            auto it = touched.find(a);
            if (it == touched.end()) it = touched.emplace(a, ledger_.account(a)).first;
            return it->second;
        };
        TokenAmount total;
        for (const auto& e : claim.entries) {
            AccountState& s = slot(e.address);
            s.rbalance -= e.amount;
            s.frozen_total -= e.amount;
            total += e.amount;
        }
        slot(claim.victim).rbalance += total;

        ledger_.block_ = current;
        if (!total.is_zero()) ledger_.log_.record(claim_sender(id), claim.victim, total, current);
        for (auto& [addr, state] : touched) ledger_.accounts_[addr] = state;
        claim.status = ClaimStatus::Reversed;
    }

    /// Releases the claim's freezes and restores the debited spend amounts
    /// whose records still exist.
    void reject_reverse(const Address& caller, const ClaimId& id, BlockNumber current) {
        require_governance(caller);
        Claim& claim = open_claim(id);
        if (current < ledger_.current_block())
            throw BlockRegressionError("rejectReverse at block " + std::to_string(current) +
                                       " is before current block " + std::to_string(ledger_.current_block()));
        ledger_.block_ = current;
        for (const auto& e : claim.entries) ledger_.mutable_account(e.address).frozen_total -= e.amount;
        for (const auto& d : claim.debits) ledger_.log_.credit_back(d.ref, d.amount);
        claim.status = ClaimStatus::Rejected;
    }

    const Claim& claim(const ClaimId& id) const {
        auto it = claims_.find(id);
        if (it == claims_.end()) throw UnknownClaimError(id.hex());
        return it->second;
    }
    const std::map<ClaimId, Claim>& claims() const { return claims_; }
    const FreezeAnalysis& analysis(const ClaimId& id) const { return analyses_.at(id); }

    /// Sum of the frozen amounts of all open claims at `a`; equals the
    /// ledger's frozen total when bookkeeping is consistent.
    TokenAmount open_freezes_at(const Address& a) const {
        TokenAmount t;
        for (const auto& [id, c] : claims_)
            if (c.status == ClaimStatus::Frozen)
                for (const auto& e : c.entries)
                    if (e.address == a) t += e.amount;
        return t;
    }

    static Address claim_sender(const ClaimId& id) { return Address{"claim:" + id.hex()}; }

    bool same_state(const FreezeEngine& o) const {
        return ledger_ == o.ledger_ && claims_ == o.claims_ && governance_ == o.governance_ &&
               claim_nonce_ == o.claim_nonce_;
    }

private:
    void require_governance(const Address& caller) const {
        if (caller != governance_) throw NotGovernanceError(caller.id + " is not the governance address");
    }

    Claim& open_claim(const ClaimId& id) {
        auto it = claims_.find(id);
        if (it == claims_.end()) throw UnknownClaimError(id.hex());
        if (it->second.status != ClaimStatus::Frozen)
            throw ClaimNotFrozenError("claim " + id.hex() + " is " + to_string(it->second.status));
        return it->second;
    }

    ClaimId next_claim_id(const SpenditureRef& disputed, BlockNumber current) {
        Sha256 h;
        h.update("rledger.claim").update_u64(claim_nonce_).update_u64(current);
        h.update_u64(disputed.epoch).update(disputed.from.id).update_byte(0).update_u64(disputed.index);
        ++claim_nonce_;
        return h.finish();
    }

    Ledger ledger_;
    Address governance_;
    std::map<ClaimId, Claim> claims_;
    std::map<ClaimId, FreezeAnalysis> analyses_;
    std::uint64_t claim_nonce_ = 0;
};

}  // namespace rledger
