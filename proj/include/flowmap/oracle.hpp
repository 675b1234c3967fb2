// Brute-force ground truth for small instances: exhaustive enumeration of
// feasible placements, and the longest-path reduction used to generate
// adversarial instances. Deliberately naive; correctness must be obvious.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "flowmap/model.hpp"
#include "flowmap/verify.hpp"

namespace flowmap {

struct OracleLimits {
    std::size_t max_nodes = 10;
    bool force = false;  // lift the size refusal (tests only)
};

namespace detail {

/// Enumerate every count assignment for the blocks of one resource path:
/// first and last block host at least one pipeline node, interior blocks may
/// be pure pass-through, counts sum to p. Each assignment becomes a
/// PartialMap candidate; the verifier decides feasibility.
inline void enumerate_compositions(const ResourceGraph& graph, const DataflowPath& path,
                                   const std::vector<NodeIndex>& nodes, std::size_t at,
                                   std::int32_t remaining, std::vector<Block>& blocks,
                                   std::vector<PartialMap>& out) {
    const std::size_t last = nodes.size() - 1;
    if (at == last) {
        if (remaining < 1) return;
        blocks.push_back({nodes[at], remaining});
        PartialMap m;
        m.blocks = blocks;
        m.prefix_len = static_cast<std::int32_t>(path.length());
        m.cost = 0.0;
        for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
            auto link = graph.find_edge(blocks[i].node, blocks[i + 1].node);
            m.cost += graph.edges()[*link].latency;
        }
        if (verify_path_mapping(graph, path, to_complete_mapping(m, path.length())).feasible())
            out.push_back(std::move(m));
        blocks.pop_back();
        return;
    }
    const std::int32_t lo = (at == 0) ? 1 : 0;
    // Leave at least one pipeline node for the final block.
    for (std::int32_t c = lo; c <= remaining - 1; ++c) {
        blocks.push_back({nodes[at], c});
        enumerate_compositions(graph, path, nodes, at + 1, remaining - c, blocks, out);
        blocks.pop_back();
    }
}

inline void enumerate_paths(const ResourceGraph& graph, const DataflowPath& path, NodeIndex sink,
                            std::vector<NodeIndex>& nodes, std::vector<bool>& visited,
                            std::vector<PartialMap>& out) {
    const NodeIndex u = nodes.back();
    if (u == sink) {
        std::vector<Block> blocks;
        enumerate_compositions(graph, path, nodes, 0, static_cast<std::int32_t>(path.length()),
                               blocks, out);
        return;
    }
    for (const AdjEntry& adj : graph.neighbors(u)) {
        if (visited[adj.neighbor]) continue;
        visited[adj.neighbor] = true;
        nodes.push_back(adj.neighbor);
        enumerate_paths(graph, path, sink, nodes, visited, out);
        nodes.pop_back();
        visited[adj.neighbor] = false;
    }
}

}  // namespace detail

/// Every feasible complete placement of the pipeline, found by enumerating
/// all simple source->sink resource paths and all block compositions on each,
/// keeping exactly those the verifier accepts. Result is sorted by block
/// sequence (the canonical set order). Refuses oversized instances.
inline std::vector<PartialMap> enumerate_feasible(const ResourceGraph& graph,
                                                  const DataflowPath& path,
                                                  const OracleLimits& limits = {}) {
    if (graph.node_count() > limits.max_nodes && !limits.force)
        throw std::invalid_argument("enumeration refused: " + std::to_string(graph.node_count()) +
                                    " nodes exceeds the limit of " +
                                    std::to_string(limits.max_nodes));
    auto src = graph.index_of(path.source_pin);
    auto snk = graph.index_of(path.sink_pin);
    if (!src || !snk)
        throw std::invalid_argument("enumeration needs resolvable source and sink pins");
    std::vector<PartialMap> out;
    std::vector<NodeIndex> nodes{*src};
    std::vector<bool> visited(graph.node_count(), false);
    visited[*src] = true;
    detail::enumerate_paths(graph, path, *snk, nodes, visited, out);
    std::sort(out.begin(), out.end(),
              [](const PartialMap& a, const PartialMap& b) { return blocks_less(a.blocks, b.blocks); });
    return out;
}

/// Minimum-cost element of enumerate_feasible, ties broken by block sequence
/// (the same order every solver uses). Absent when nothing is feasible.
inline std::optional<PartialMap> brute_force_optimal(const ResourceGraph& graph,
                                                     const DataflowPath& path,
                                                     const OracleLimits& limits = {}) {
    std::vector<PartialMap> all = enumerate_feasible(graph, path, limits);
    if (all.empty()) return std::nullopt;
    const PartialMap* best = &all[0];
    for (const PartialMap& m : all)
        if (cost_blocks_less(m, *best)) best = &m;
    return *best;
}

/// Longest-path reduction: reuse a graph's topology with every capacity,
/// bandwidth and latency forced to 1 and ask for a K-node pipeline of unit
/// requirements pinned s -> t. Unit capacities force distinct resource nodes
/// per pipeline node, so the instance is feasible exactly when the graph has
/// a simple s-t path on at least K nodes.
inline std::pair<ResourceGraph, DataflowPath> longest_path_to_bcpm(const ResourceGraph& g,
                                                                   const std::string& s,
                                                                   const std::string& t,
                                                                   std::int32_t k) {
    if (k < 2) throw std::invalid_argument("pipeline needs at least 2 nodes, got " + std::to_string(k));
    if (s == t) throw std::invalid_argument("source and sink must differ");
    if (!g.index_of(s) || !g.index_of(t))
        throw std::invalid_argument("source and sink must be nodes of the graph");
    ResourceGraph unit;
    for (const ResourceNode& n : g.nodes()) unit.add_node(n.id, 1.0);
    for (const ResourceEdge& e : g.edges()) unit.add_edge(e.u, e.v, 1.0, 1.0);
    DataflowPath path;
    path.comp_reqs.assign(static_cast<std::size_t>(k), 1.0);
    path.bw_reqs.assign(static_cast<std::size_t>(k) - 1, 1.0);
    path.source_pin = s;
    path.sink_pin = t;
    return {std::move(unit), std::move(path)};
}

}  // namespace flowmap
