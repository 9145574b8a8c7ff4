#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "rledger/freeze_engine.hpp"

using namespace rledger;

namespace {

const Address gov{"gov"}, v{"v"}, x{"x"}, p{"p"};
const Address a0{"a0"}, a1{"a1"}, a2{"a2"}, a3{"a3"}, a4{"a4"};
TokenAmount T(std::uint64_t n) { return TokenAmount{n}; }

TokenAmount frozen_at(const FreezePlan& plan, const Address& a) {
    for (const auto& n : plan.nodes)
        if (n.address == a) return n.frozen;
    return {};
}

// Hand-built graph: nodes n0..n(k-1), edges (src, dst, value, seq).
TransferGraph make_graph(std::size_t k, const std::vector<std::tuple<int, int, int, int>>& edges) {
    TransferGraph g;
    for (std::size_t i = 0; i < k; ++i) g.add_node(Address{"n" + std::to_string(i)}, {}, 0);
    for (auto [s, d, val, seq] : edges)
        g.edges.push_back({static_cast<std::size_t>(s), static_cast<std::size_t>(d), T(static_cast<std::uint64_t>(val)),
                           static_cast<Seq>(seq), SpenditureRef{0, Address{"n" + std::to_string(s)},
                                                                static_cast<std::uint64_t>(seq)}});
    return g;
}

bool has_cycle(const TransferGraph& g) {
    // Exhaustive: try every simple path from every node (graphs here are tiny).
    const std::size_t n = g.size();
    std::vector<bool> on_path(n, false);
    std::function<bool(std::size_t, std::size_t)> walk = [&](std::size_t start, std::size_t u) {
        for (const auto& e : g.edges) {
            if (e.src != u) continue;
            if (e.dst == start) return true;
            if (on_path[e.dst]) continue;
            on_path[e.dst] = true;
            const bool found = walk(start, e.dst);
            on_path[e.dst] = false;
            if (found) return true;
        }
        return false;
    };
    for (std::size_t s = 0; s < n; ++s) {
        on_path.assign(n, false);
        on_path[s] = true;
        if (walk(s, s)) return true;
    }
    return false;
}

struct Engine : ::testing::Test {
    FreezeEngine eng{gov};
    Ledger& l = eng.ledger();
};

}  // namespace

// ---------------------------------------------------------------- graph build

TEST_F(Engine, GraphSkipsSpendsBeforeArrival) {
    l.mint(x, T(30), 1);
    l.mint(v, T(100), 1);
    l.transfer(x, a1, T(30), 2);
    const auto t0 = l.transfer(v, a0, T(100), 10);
    l.rtransfer(a1, a2, T(30), 11);
    l.rtransfer(a0, a1, T(60), 12);
    l.rtransfer(a1, a4, T(50), 13);
    const auto an = eng.analyze(t0);
    EXPECT_EQ(an.graph.edges.size(), 2u);
    EXPECT_FALSE(an.graph.find(a2));
    EXPECT_EQ(an.plan.to_freeze(), (std::map<Address, TokenAmount>{{a0, T(40)}, {a1, T(10)}, {a4, T(50)}}));
}

TEST_F(Engine, LeafFreezesWhatItHolds) {
    l.mint(v, T(100), 1);
    const auto t0 = l.transfer(v, a0, T(100), 10);
    l.rtransfer(a0, x, T(30), 11);
    l.rtransfer(x, p, T(30), 12);
    l.rtransfer(p, v, T(10), 13);  // p spends 10 of it back; the rest sits in p
    const auto plan = eng.analyze(t0).plan;
    EXPECT_EQ(frozen_at(plan, a0), T(70));
    EXPECT_EQ(frozen_at(plan, x), T(0));
    EXPECT_EQ(frozen_at(plan, p), T(20));
    EXPECT_EQ(frozen_at(plan, v), T(10));
    EXPECT_EQ(plan.total_frozen(), T(100));
}

TEST_F(Engine, BurnAbsorbsObligation) {
    l.mint(v, T(100), 1);
    const auto t0 = l.transfer(v, a0, T(100), 10);
    l.burn(a0, T(5), 11, BurnSource::Reversible);
    const auto an = eng.analyze(t0);
    EXPECT_EQ(an.graph.burned_at[0], T(5));
    EXPECT_EQ(an.plan.nodes[0].frozen, T(95));
    EXPECT_EQ(an.plan.total_absorbed(), T(5));
    EXPECT_EQ(an.plan.total_unplaced(), T(0));
}

// ---------------------------------------------------------------- cycles

TEST(Cycles, TwoCycleCancels) {
    auto dag = eliminate_cycles(make_graph(2, {{0, 1, 5, 1}, {1, 0, 3, 2}}));
    ASSERT_EQ(dag.edges.size(), 1u);
    EXPECT_EQ(dag.edges[0].src, 0u);
    EXPECT_EQ(dag.edges[0].value, T(2));
}

TEST(Cycles, AcyclicIsFixpoint) {
    const auto g = make_graph(4, {{0, 1, 5, 1}, {0, 2, 3, 2}, {1, 3, 4, 3}, {2, 3, 1, 4}});
    std::vector<CycleCancellation> trace;
    EXPECT_EQ(eliminate_cycles(g, &trace), g);
    EXPECT_TRUE(trace.empty());
}

TEST(Cycles, TieBrokenByLowestSeqAndZeroEdgesKept) {
    std::vector<CycleCancellation> trace;
    auto dag = eliminate_cycles(make_graph(3, {{0, 1, 4, 1}, {1, 2, 4, 2}, {2, 0, 7, 3}}), &trace);
    ASSERT_EQ(trace.size(), 1u);
    EXPECT_EQ(trace[0].removed.index, 1u);
    ASSERT_EQ(dag.edges.size(), 2u);
    EXPECT_EQ(dag.edges[0].seq, 2u);
    EXPECT_EQ(dag.edges[0].value, T(0));
    EXPECT_EQ(dag.edges[1].seq, 3u);
    EXPECT_EQ(dag.edges[1].value, T(3));
}

TEST(Cycles, RandomSmallGraphsBecomeAcyclic) {
    std::mt19937_64 rng(11);
    int cyclic = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t n = 2 + rng() % 5;
        std::vector<std::tuple<int, int, int, int>> edges;
        const int m = static_cast<int>(rng() % 12);
        for (int k = 0; k < m; ++k) {
            int s = static_cast<int>(rng() % n), d = static_cast<int>(rng() % n);
            if (s == d) continue;
            edges.emplace_back(s, d, static_cast<int>(rng() % 10), k + 1);
        }
        const auto g = make_graph(n, edges);
        cyclic += has_cycle(g) ? 1 : 0;
        const auto dag = eliminate_cycles(g);
        ASSERT_FALSE(has_cycle(dag)) << "trial " << trial;
        ASSERT_LE(dag.edges.size(), g.edges.size());
        for (const auto& e : dag.edges) {
            auto orig = std::find_if(g.edges.begin(), g.edges.end(), [&](const GraphEdge& o) { return o.seq == e.seq; });
            ASSERT_NE(orig, g.edges.end());
            EXPECT_LE(e.value, orig->value);
        }
    }
    EXPECT_GT(cyclic, 500);
}

// ---------------------------------------------------------------- worked histories

TEST_F(Engine, SingleTheft) {
    l.mint(v, T(100), 1);
    const auto t0 = l.transfer(v, a0, T(100), 10);
    const auto id = eng.execute_freeze(gov, t0, v, 20);
    EXPECT_EQ(eng.claim(id).total_frozen(), T(100));
    EXPECT_EQ(l.account(a0).frozen_total, T(100));
    EXPECT_THROW(l.rtransfer(a0, x, T(1), 21), FrozenFloorError);
    eng.reverse(gov, id, 30);
    EXPECT_EQ(l.account(v), (AccountState{T(100), T(0), T(0)}));
    EXPECT_EQ(l.account(a0), AccountState{});
}

TEST_F(Engine, SplitTheft) {
    l.mint(v, T(100), 1);
    const auto t0 = l.transfer(v, a0, T(100), 10);
    l.rtransfer(a0, a1, T(25), 11);
    l.rtransfer(a0, a2, T(25), 12);
    const auto plan = eng.analyze(t0).plan;
    EXPECT_EQ(plan.to_freeze(), (std::map<Address, TokenAmount>{{a0, T(50)}, {a1, T(25)}, {a2, T(25)}}));
}

TEST_F(Engine, MostRecentOutflowCarriesObligation) {
    l.mint(v, T(10), 1);
    l.mint(p, T(10), 1);
    l.transfer(p, a1, T(10), 2);
    const auto t0 = l.transfer(v, a0, T(10), 10);
    l.rtransfer(a0, a1, T(10), 11);
    l.rtransfer(a1, a2, T(10), 12);
    l.rtransfer(a1, a3, T(10), 13);
    const auto plan = eng.analyze(t0).plan;
    EXPECT_EQ(frozen_at(plan, a3), T(10));
    EXPECT_EQ(frozen_at(plan, a2), T(0));
}

TEST_F(Engine, SplitForwardingReachesBothSinks) {
    l.mint(v, T(20), 1);
    const auto t0 = l.transfer(v, a0, T(20), 10);
    l.rtransfer(a0, a1, T(10), 11);
    l.rtransfer(a1, a2, T(10), 12);
    l.rtransfer(a0, a1, T(10), 13);
    l.rtransfer(a1, a3, T(10), 14);
    const auto plan = eng.analyze(t0).plan;
    EXPECT_EQ(plan.total_frozen(), T(20));
    EXPECT_EQ(frozen_at(plan, a2), T(10));
    EXPECT_EQ(frozen_at(plan, a3), T(10));
}

// ---------------------------------------------------------------- lifecycle

TEST_F(Engine, DoubleFreezePrevented) {
    l.mint(x, T(50), 1);
    l.mint(v, T(50), 1);
    l.transfer(x, a1, T(50), 2);
    const auto t0 = l.transfer(v, a0, T(50), 10);
    const auto t1 = l.rtransfer(a0, a1, T(50), 11);
    const auto c1 = eng.execute_freeze(gov, t0, v, 20);
    EXPECT_EQ(l.account(a1).frozen_total, T(50));
    EXPECT_EQ(l.log().resolve(t1).amount, T(0));
    const auto c2 = eng.execute_freeze(gov, t1, a0, 21);
    EXPECT_EQ(eng.claim(c2).total_frozen(), T(0));
    EXPECT_EQ(l.account(a1).frozen_total, T(50));
    eng.reject_reverse(gov, c2, 22);
    eng.reject_reverse(gov, c1, 23);
    EXPECT_EQ(l.log().resolve(t1).amount, T(50));
    EXPECT_EQ(l.log().resolve(t0).amount, T(50));
    EXPECT_EQ(l.account(a1).frozen_total, T(0));
}

TEST_F(Engine, TwoTheftsAccumulate) {
    l.mint(v, T(100), 1);
    l.mint(p, T(100), 1);
    const auto t0 = l.transfer(v, a0, T(30), 10);
    const auto t1 = l.transfer(p, a0, T(40), 11);
    eng.execute_freeze(gov, t0, v, 20);
    eng.execute_freeze(gov, t1, p, 21);
    EXPECT_EQ(l.account(a0).frozen_total, T(70));
    EXPECT_EQ(eng.open_freezes_at(a0), T(70));
}

TEST(EngineWindow, ElapsedWindowLeavesStateUnchanged) {
    FreezeEngine eng(gov, EpochConfig{1000, 100});
    eng.ledger().mint(v, T(10), 1);
    const auto t0 = eng.ledger().transfer(v, a0, T(10), 10);
    const FreezeEngine before = eng;
    EXPECT_THROW(eng.execute_freeze(gov, t0, v, 111), WindowElapsedError);
    EXPECT_TRUE(eng.same_state(before));
    EXPECT_NO_THROW(eng.execute_freeze(gov, t0, v, 110));
}

TEST_F(Engine, GuardsOnFreeze) {
    l.mint(v, T(10), 1);
    const auto t0 = l.transfer(v, a0, T(10), 10);
    const FreezeEngine before = eng;
    EXPECT_THROW(eng.execute_freeze(x, t0, v, 20), NotGovernanceError);
    EXPECT_THROW(eng.execute_freeze(gov, t0, x, 20), NotAffectedPartyError);
    EXPECT_THROW(eng.execute_freeze(gov, SpenditureRef{0, v, 9}, v, 20), UnknownSpenditureError);
    EXPECT_TRUE(eng.same_state(before));
}

TEST_F(Engine, ReverseMovesFrozenToVictim) {
    l.mint(v, T(15), 1);
    const auto t0 = l.transfer(v, a0, T(15), 10);
    l.rtransfer(a0, a1, T(10), 11);
    l.rtransfer(a0, a2, T(5), 12);
    const auto id = eng.execute_freeze(gov, t0, v, 20);
    EXPECT_EQ(eng.claim(id).total_frozen(), T(15));
    const auto seq_before = l.log().next_seq();
    eng.reverse(gov, id, 21);
    EXPECT_EQ(l.account(v).rbalance, T(15));
    EXPECT_EQ(l.account(a1), AccountState{});
    EXPECT_EQ(l.account(a2), AccountState{});
    EXPECT_EQ(l.log().next_seq(), seq_before + 1);
    const auto last = l.log().outgoing_between(FreezeEngine::claim_sender(id), 0, UINT64_MAX);
    ASSERT_EQ(last.size(), 1u);
    EXPECT_EQ(last[0].second.amount, T(15));
    EXPECT_THROW(eng.reverse(gov, id, 22), ClaimNotFrozenError);
    EXPECT_THROW(eng.reject_reverse(gov, id, 22), ClaimNotFrozenError);
    EXPECT_THROW(eng.reverse(x, id, 22), NotGovernanceError);
    EXPECT_THROW(eng.reverse(gov, ClaimId{}, 22), UnknownClaimError);
}

TEST_F(Engine, EmptyClaimReverses) {
    l.mint(v, T(10), 1);
    const auto t0 = l.transfer(v, a0, T(10), 10);
    l.rtransfer(a0, x, T(10), 11);
    l.transfer(v, v, T(0), 11);
    eng.execute_freeze(gov, t0, v, 12);  // freezes the 10 at x
    const auto again = eng.execute_freeze(gov, t0, v, 13);  // t0 fully debited already
    EXPECT_EQ(eng.claim(again).total_frozen(), T(0));
    const auto seq = l.log().next_seq();
    eng.reverse(gov, again, 14);
    EXPECT_EQ(l.log().next_seq(), seq);
    EXPECT_EQ(eng.claim(again).status, ClaimStatus::Reversed);
}

TEST(EngineClean, RejectAfterCleanSkipsDanglingRefs) {
    FreezeEngine eng(gov, EpochConfig{10, 100});
    Ledger& l = eng.ledger();
    l.mint(v, T(50), 1);
    const auto t0 = l.transfer(v, a0, T(50), 1);
    const auto t1 = l.rtransfer(a0, a1, T(20), 2);
    const auto id = eng.execute_freeze(gov, t0, v, 50);
    EXPECT_EQ(l.account(a1).frozen_total, T(20));
    l.clean(0, {v, a0}, 150);  // records gone; frozen amounts stay reversible
    EXPECT_EQ(l.log().find(t1), nullptr);
    EXPECT_EQ(l.account(a1).rbalance, T(20));
    EXPECT_EQ(l.account(a1).frozen_total, T(20));
    eng.reject_reverse(gov, id, 151);
    EXPECT_EQ(l.account(a1).frozen_total, T(0));
    EXPECT_EQ(l.account(a0).frozen_total, T(0));
    EXPECT_THROW(eng.reject_reverse(gov, id, 152), ClaimNotFrozenError);
}

TEST_F(Engine, RTransferFloorCases) {
    l.mint(v, T(25), 1);
    l.mint(p, T(15), 1);
    const auto t0 = l.transfer(v, a1, T(25), 2);
    l.transfer(p, a1, T(15), 3);
    eng.execute_freeze(gov, t0, v, 4);
    EXPECT_EQ(l.account(a1), (AccountState{T(40), T(0), T(25)}));
    EXPECT_EQ(l.available_rbalance(a1), T(15));
    const auto before = l;
    EXPECT_THROW(l.rtransfer(a1, x, T(20), 5), FrozenFloorError);
    EXPECT_EQ(l, before);
    l.rtransfer(a1, x, T(15), 5);
    EXPECT_EQ(l.account(a1).rbalance, T(25));
    EXPECT_EQ(l.available_rbalance(a1), T(0));
}

TEST(EngineClean, CleanClampsByFrozen) {
    FreezeEngine e(gov, EpochConfig{1000, 100});
    Ledger& lg = e.ledger();
    lg.mint(v, T(30), 1);
    lg.mint(p, T(10), 1);
    const auto t0 = lg.transfer(v, a0, T(30), 50);
    lg.transfer(p, a0, T(10), 51);
    e.execute_freeze(gov, t0, v, 60);
    EXPECT_EQ(lg.account(a0), (AccountState{T(40), T(0), T(30)}));
    const auto r = lg.clean(0, {v, p}, 200);
    EXPECT_EQ(r.total_removed(), 2u);
    EXPECT_EQ(r.total_matured(), T(10));
    EXPECT_EQ(lg.account(a0), (AccountState{T(30), T(10), T(30)}));
}
