#pragma once

// Synthetic large-DAG run of the obligation pass, for the linear-time claim.

#include <chrono>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rledger/freeze_engine.hpp"

namespace rledger::bench {

struct Options {
    std::size_t nodes = 10000;
    std::size_t edges = 100000;
    std::uint64_t seed = 1;
};

struct Result {
    Options options;
    FreezeStats stats;
    TokenAmount disputed;
    TokenAmount frozen;
    TokenAmount unplaced;
    double calc_ms = 0;

    std::size_t touches() const { return stats.nodes_visited + stats.edges_touched; }
    bool within_bound() const {
        return touches() <= options.nodes + options.edges && stats.sort_touches <= options.nodes + options.edges;
    }

    nlohmann::json to_json() const {
        return {{"nodes", options.nodes},
                {"edges", options.edges},
                {"seed", options.seed},
                {"nodesVisited", stats.nodes_visited},
                {"edgesTouched", stats.edges_touched},
                {"sortTouches", stats.sort_touches},
                {"withinBound", within_bound()},
                {"disputed", disputed.to_string()},
                {"frozen", frozen.to_string()},
                {"unplaced", unplaced.to_string()},
                {"calcMs", calc_ms}};
    }
    std::string to_text() const {
        std::ostringstream os;
        os << "bench V=" << options.nodes << " E=" << options.edges << " seed=" << options.seed << "\n"
           << "  nodes visited " << stats.nodes_visited << ", edges touched " << stats.edges_touched
           << ", sort touches " << stats.sort_touches << " (bound " << options.nodes + options.edges << ": "
           << (within_bound() ? "ok" : "EXCEEDED") << ")\n"
           << "  froze " << frozen << " of " << disputed << ", unplaced " << unplaced << "\n"
           << "  calcFreeze " << calc_ms << " ms\n";
        return os.str();
    }
};

/// Random DAG rooted at node 0: a spanning backbone (every node reachable)
/// plus random forward edges i -> j with i < j. Seqs are a random
/// permutation, so out-edge order is unrelated to node order. Values follow
/// the money: each node splits what it received, minus its balance, evenly
/// over its out-edges, so the disputed amount reaches every edge.
inline TransferGraph random_dag(const Options& opt, TokenAmount disputed) {
    std::mt19937_64 rng(opt.seed);
    TransferGraph g;
    for (std::size_t i = 0; i < opt.nodes; ++i)
        g.add_node(Address{"n" + std::to_string(i)}, TokenAmount{rng() % 4}, i);
    const std::size_t m = std::max(opt.edges, opt.nodes > 0 ? opt.nodes - 1 : 0);
    std::vector<Seq> seqs(m);
    for (std::size_t i = 0; i < m; ++i) seqs[i] = opt.nodes + i;
    std::shuffle(seqs.begin(), seqs.end(), rng);

    g.edges.reserve(m);
    for (std::size_t j = 1; j < opt.nodes; ++j) g.edges.push_back({rng() % j, j, {}, seqs[j - 1], SpenditureRef{}});
    for (std::size_t k = g.edges.size(); k < m; ++k) {
        std::size_t a = rng() % opt.nodes, b = rng() % opt.nodes;
        while (a == b) b = rng() % opt.nodes;
        if (a > b) std::swap(a, b);
        g.edges.push_back({a, b, {}, seqs[k], SpenditureRef{}});
    }

    std::vector<std::vector<std::size_t>> out(opt.nodes);
    for (std::size_t e = 0; e < g.edges.size(); ++e) out[g.edges[e].src].push_back(e);
    std::vector<TokenAmount> received(opt.nodes);
    if (opt.nodes > 0) received[0] = disputed;
    for (std::size_t u = 0; u < opt.nodes; ++u) {  // index order is topological
        if (out[u].empty()) continue;
        const TokenAmount share{saturating_sub(received[u], g.available[u]).value() / out[u].size()};
        for (std::size_t e : out[u]) {
            g.edges[e].value = share;
            received[g.edges[e].dst] += share;
        }
    }
    return g;
}

inline Result run(const Options& opt) {
    Result r;
    r.options = opt;
    r.disputed = TokenAmount{static_cast<u128>(1) << 100};
    const TransferGraph g = random_dag(opt, r.disputed);
    const auto start = std::chrono::steady_clock::now();
    const FreezePlan plan = calc_freeze(g, r.disputed);
    r.calc_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    r.stats = plan.stats;
    r.frozen = plan.total_frozen();
    r.unplaced = plan.total_unplaced();
    return r;
}

}  // namespace rledger::bench
