// Seeded random instance generation: Waxman-style geometric topologies made
// connected by a uniformly random spanning tree, and random pipelines scaled
// to the generated supply.
#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "flowmap/model.hpp"
#include "flowmap/policy.hpp"

namespace flowmap {

struct Range {
    double lo = 1.0;
    double hi = 10.0;
};

struct GenParams {
    std::uint32_t n = 2;
    double waxman_alpha = 0.15;  // distance decay scale
    double waxman_beta = 0.2;    // overall edge density
    Range capacity_range{1.0, 10.0};
    Range bandwidth_range{1.0, 10.0};
    Range latency_range{1.0, 10.0};
    std::uint32_t p = 2;    // pipeline length
    double req_scale = 0.5;  // requirements as a fraction of median supply
    std::uint64_t seed = 0;
};

inline std::optional<std::string> validate_params(const GenParams& g) {
    if (g.n < 2) return "n must be >= 2";
    if (g.p < 2) return "p must be >= 2";
    if (!(g.waxman_alpha > 0.0) || !std::isfinite(g.waxman_alpha)) return "waxman_alpha must be > 0";
    if (!(g.waxman_beta > 0.0 && g.waxman_beta <= 1.0)) return "waxman_beta must be in (0, 1]";
    if (!(g.req_scale >= 0.0) || !std::isfinite(g.req_scale)) return "req_scale must be >= 0";
    for (auto [r, name] : {std::pair{g.capacity_range, "capacity_range"},
                           std::pair{g.bandwidth_range, "bandwidth_range"},
                           std::pair{g.latency_range, "latency_range"}}) {
        if (!(r.lo >= 0.0 && r.lo <= r.hi && std::isfinite(r.hi)))
            return std::string(name) + " must satisfy 0 <= lo <= hi";
    }
    return std::nullopt;
}

/// Introspection for distribution tests: node positions and the connection
/// probability of every node pair in ascending (i, j) order.
struct WaxmanDebug {
    std::vector<std::pair<double, double>> positions;
    std::vector<double> pair_prob;
};

namespace detail {

inline double uniform_in(Rng& rng, const Range& r) { return r.lo + u01(rng) * (r.hi - r.lo); }

/// Uniformly random spanning tree of the complete graph on n nodes, via
/// loop-erased random walks (successor overwriting erases cycles).
inline std::vector<std::pair<NodeIndex, NodeIndex>> uniform_spanning_tree(std::uint32_t n,
                                                                          Rng& rng) {
    std::vector<bool> in_tree(n, false);
    std::vector<NodeIndex> next(n, 0);
    std::vector<std::pair<NodeIndex, NodeIndex>> edges;
    in_tree[0] = true;
    for (NodeIndex i = 1; i < n; ++i) {
        NodeIndex u = i;
        while (!in_tree[u]) {
            NodeIndex j = static_cast<NodeIndex>(uniform_index(rng, n - 1));
            if (j >= u) ++j;  // uniform over the other n-1 nodes
            next[u] = j;
            u = j;
        }
        u = i;
        while (!in_tree[u]) {
            in_tree[u] = true;
            edges.emplace_back(u, next[u]);
            u = next[u];
        }
    }
    return edges;
}

}  // namespace detail

/// Geometric random topology: n nodes uniform in the unit square, each pair
/// linked with probability beta * exp(-d / (alpha * L)) where d is their
/// distance and L the largest pairwise distance, then the missing edges of a
/// uniformly random spanning tree added so the result is always connected.
/// Node capacities and link attributes are drawn uniformly from the
/// configured ranges. Byte-for-byte reproducible from the seed: the draw
/// order (positions, pair coins, tree walk, capacities, link attributes in
/// ascending pair order) is fixed.
inline ResourceGraph waxman_topology(const GenParams& params, WaxmanDebug* debug = nullptr) {
    if (auto bad = validate_params(params))
        throw std::invalid_argument("generation parameters: " + *bad);
    const std::uint32_t n = params.n;
    Rng rng(params.seed);

    std::vector<std::pair<double, double>> pos(n);
    for (auto& [x, y] : pos) {
        x = u01(rng);
        y = u01(rng);
    }
    double longest = 0.0;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            longest = std::max(longest, std::hypot(pos[i].first - pos[j].first,
                                                   pos[i].second - pos[j].second));

    std::set<std::pair<NodeIndex, NodeIndex>> chosen;
    std::vector<double> probs;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) {
            double d = std::hypot(pos[i].first - pos[j].first, pos[i].second - pos[j].second);
            // Degenerate geometry (all points coincident) falls back to beta.
            double prob = longest > 0.0
                              ? params.waxman_beta * std::exp(-d / (params.waxman_alpha * longest))
                              : params.waxman_beta;
            probs.push_back(prob);
            if (u01(rng) < prob) chosen.insert({i, j});
        }
    for (auto [u, v] : detail::uniform_spanning_tree(n, rng))
        chosen.insert({std::min(u, v), std::max(u, v)});

    ResourceGraph out;
    for (std::uint32_t i = 0; i < n; ++i)
        out.add_node(std::to_string(i), detail::uniform_in(rng, params.capacity_range));
    for (auto [u, v] : chosen) {
        double bw = detail::uniform_in(rng, params.bandwidth_range);
        double lat = detail::uniform_in(rng, params.latency_range);
        out.add_edge(u, v, bw, lat);
    }
    if (debug) {
        debug->positions = std::move(pos);
        debug->pair_prob = std::move(probs);
    }
    return out;
}

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Random pipeline for a generated graph: distinct uniform pins, requirements
/// uniform in [0, req_scale * median supply]. Draws from a stream derived
/// from the seed, so topology and pipeline stay independently reproducible.
inline DataflowPath random_dataflow_path(const ResourceGraph& graph, const GenParams& params) {
    if (auto bad = validate_params(params))
        throw std::invalid_argument("generation parameters: " + *bad);
    if (graph.node_count() < 2)
        throw std::invalid_argument("pipeline generation needs at least 2 nodes");
    Rng rng(mix_seed(params.seed));

    const std::size_t n = graph.node_count();
    std::size_t src = uniform_index(rng, n);
    std::size_t snk = uniform_index(rng, n - 1);
    if (snk >= src) ++snk;

    std::vector<double> caps, bws;
    for (const ResourceNode& node : graph.nodes()) caps.push_back(node.capacity);
    for (const ResourceEdge& e : graph.edges()) bws.push_back(e.bandwidth);
    const double cap_top = params.req_scale * median(std::move(caps));
    const double bw_top = params.req_scale * median(std::move(bws));

    DataflowPath path;
    for (std::uint32_t i = 0; i < params.p; ++i) path.comp_reqs.push_back(u01(rng) * cap_top);
    for (std::uint32_t i = 0; i + 1 < params.p; ++i) path.bw_reqs.push_back(u01(rng) * bw_top);
    path.source_pin = graph.id_of(static_cast<NodeIndex>(src));
    path.sink_pin = graph.id_of(static_cast<NodeIndex>(snk));
    return path;
}

}  // namespace flowmap
