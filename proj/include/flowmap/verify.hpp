// Feasibility verification for pipeline and DAG placements, plus the
// bandwidth-constrained shortest-path primitive used to check vertex-only
// mappings in polynomial time.
#pragma once

#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowmap/model.hpp"

namespace flowmap {

/// Minimum-latency path from a to b using only edges with bandwidth >= bw.
/// Returns the node sequence a..b inclusive; a == b yields the zero-length
/// path {a}. Deterministic: ties settle toward the smaller node index.
inline std::optional<std::vector<NodeIndex>> widest_constrained_path(const ResourceGraph& graph,
                                                                     NodeIndex a, NodeIndex b,
                                                                     double bw) {
    const std::size_t n = graph.node_count();
    if (a >= n || b >= n) return std::nullopt;
    if (a == b) return std::vector<NodeIndex>{a};

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, kInf);
    std::vector<NodeIndex> parent(n, 0);
    std::vector<bool> settled(n, false);
    using Item = std::pair<double, NodeIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[a] = 0.0;
    pq.push({0.0, a});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (settled[u]) continue;
        settled[u] = true;
        if (u == b) break;
        for (const AdjEntry& adj : graph.neighbors(u)) {
            const ResourceEdge& e = graph.edges()[adj.edge];
            if (e.bandwidth < bw) continue;
            double nd = d + e.latency;
            if (nd < dist[adj.neighbor]) {
                dist[adj.neighbor] = nd;
                parent[adj.neighbor] = u;
                pq.push({nd, adj.neighbor});
            }
        }
    }
    if (!settled[b]) return std::nullopt;
    std::vector<NodeIndex> path;
    for (NodeIndex cur = b;; cur = parent[cur]) {
        path.push_back(cur);
        if (cur == a) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

/// Total latency of a mapping: sum over pipeline edges of the latencies along
/// the route carrying that edge, accumulated first hop to last. Zero-length
/// routes contribute nothing. Throws if a route uses a nonexistent link.
inline double mapping_cost(const ResourceGraph& graph, const CompleteMapping& m) {
    double total = 0.0;
    for (std::size_t e = 0; e < m.edge_map.size(); ++e) {
        const auto& route = m.edge_map[e];
        for (std::size_t i = 0; i + 1 < route.size(); ++i) {
            auto link = graph.find_edge(route[i], route[i + 1]);
            if (!link)
                throw std::invalid_argument("mapping edge_map[" + std::to_string(e) +
                                            "] uses nonexistent link " + graph.id_of(route[i]) +
                                            "-" + graph.id_of(route[i + 1]));
            total += graph.edges()[*link].latency;
        }
    }
    return total;
}

/// Fill in missing routes of a vertex-only mapping: each pipeline edge gets a
/// minimum-latency route among links with enough bandwidth. Returns nothing
/// if some pipeline edge has no such route. Cost is recomputed.
inline std::optional<CompleteMapping> synthesize_edge_paths(const ResourceGraph& graph,
                                                            const DataflowPath& path,
                                                            const CompleteMapping& m) {
    const std::size_t p = path.length();
    if (m.vertex_map.size() != p) return std::nullopt;
    CompleteMapping out;
    out.vertex_map = m.vertex_map;
    for (std::size_t e = 0; e + 1 < p; ++e) {
        auto route = widest_constrained_path(graph, m.vertex_map[e], m.vertex_map[e + 1],
                                             path.bw_reqs[e]);
        if (!route) return std::nullopt;
        out.edge_map.push_back(std::move(*route));
    }
    out.cost = mapping_cost(graph, out);
    return out;
}

/// Check a complete mapping against every placement constraint: pins, per
/// resource node aggregate capacity, per pipeline edge bandwidth along its
/// route, and route continuity. A mapping without routes (empty edge_map) is
/// verified by synthesizing one bandwidth-feasible route per pipeline edge;
/// failure to find one is a bandwidth violation.
inline FeasibilityReport verify_path_mapping(const ResourceGraph& graph, const DataflowPath& path,
                                             const CompleteMapping& mapping) {
    FeasibilityReport rep;
    const std::size_t p = path.length();
    if (mapping.vertex_map.size() != p) {
        rep.add(ViolationKind::structure,
                "vertex_map has " + std::to_string(mapping.vertex_map.size()) + " entries, pipeline has " +
                    std::to_string(p) + " nodes");
        return rep;
    }
    for (NodeIndex v : mapping.vertex_map)
        if (v >= graph.node_count()) {
            rep.add(ViolationKind::structure, "vertex_map entry out of range");
            return rep;
        }

    auto src = graph.index_of(path.source_pin);
    auto snk = graph.index_of(path.sink_pin);
    if (!src || mapping.vertex_map.front() != *src)
        rep.add(ViolationKind::pin, "pipeline node 0 must be placed on '" + path.source_pin + "'");
    if (!snk || mapping.vertex_map.back() != *snk)
        rep.add(ViolationKind::pin,
                "pipeline node " + std::to_string(p - 1) + " must be placed on '" + path.sink_pin + "'");

    std::vector<double> used(graph.node_count(), 0.0);
    for (std::size_t i = 0; i < p; ++i) used[mapping.vertex_map[i]] += path.comp_reqs[i];
    for (NodeIndex v = 0; v < graph.node_count(); ++v)
        if (used[v] > graph.capacity(v))
            rep.add(ViolationKind::capacity, "node '" + graph.id_of(v) + "': requirements " +
                                                 std::to_string(used[v]) + " exceed capacity " +
                                                 std::to_string(graph.capacity(v)));

    if (mapping.edge_map.empty() && p >= 2) {
        // Vertex-only mapping: feasible iff every pipeline edge admits some
        // bandwidth-sufficient route, checked one edge at a time so each
        // failure is reported individually.
        for (std::size_t e = 0; e + 1 < p; ++e) {
            auto route = widest_constrained_path(graph, mapping.vertex_map[e],
                                                 mapping.vertex_map[e + 1], path.bw_reqs[e]);
            if (!route)
                rep.add(ViolationKind::bandwidth,
                        "pipeline edge " + std::to_string(e) + ": no route from '" +
                            graph.id_of(mapping.vertex_map[e]) + "' to '" +
                            graph.id_of(mapping.vertex_map[e + 1]) + "' with bandwidth >= " +
                            std::to_string(path.bw_reqs[e]));
        }
        return rep;
    }

    if (mapping.edge_map.size() + 1 != p) {
        rep.add(ViolationKind::structure,
                "edge_map has " + std::to_string(mapping.edge_map.size()) + " routes, pipeline has " +
                    std::to_string(p - 1) + " edges");
        return rep;
    }
    for (std::size_t e = 0; e + 1 < p; ++e) {
        const auto& route = mapping.edge_map[e];
        const std::string where = "pipeline edge " + std::to_string(e);
        if (route.empty()) {
            rep.add(ViolationKind::structure, where + ": empty route");
            continue;
        }
        bool oob = false;
        for (NodeIndex v : route)
            if (v >= graph.node_count()) oob = true;
        if (oob) {
            rep.add(ViolationKind::structure, where + ": route node out of range");
            continue;
        }
        if (route.front() != mapping.vertex_map[e])
            rep.add(ViolationKind::continuity,
                    where + ": route starts at '" + graph.id_of(route.front()) +
                        "', pipeline node " + std::to_string(e) + " is on '" +
                        graph.id_of(mapping.vertex_map[e]) + "'");
        if (route.back() != mapping.vertex_map[e + 1])
            rep.add(ViolationKind::continuity,
                    where + ": route ends at '" + graph.id_of(route.back()) + "', pipeline node " +
                        std::to_string(e + 1) + " is on '" +
                        graph.id_of(mapping.vertex_map[e + 1]) + "'");
        for (std::size_t i = 0; i + 1 < route.size(); ++i) {
            auto link = graph.find_edge(route[i], route[i + 1]);
            if (!link) {
                rep.add(ViolationKind::continuity,
                        where + ": no link " + graph.id_of(route[i]) + "-" +
                            graph.id_of(route[i + 1]));
                continue;
            }
            if (graph.edges()[*link].bandwidth < path.bw_reqs[e])
                rep.add(ViolationKind::bandwidth,
                        where + ": requirement " + std::to_string(path.bw_reqs[e]) +
                            " exceeds bandwidth " + std::to_string(graph.edges()[*link].bandwidth) +
                            " on link " + graph.id_of(route[i]) + "-" + graph.id_of(route[i + 1]));
        }
    }
    return rep;
}

/// DAG verification result. Shared links can reasonably be charged once per
/// routed dataflow edge or once total; both readings of the objective are
/// reported (the solvers use the per-edge figure).
struct DagReport {
    FeasibilityReport report;
    double cost_per_edge_use = 0.0;
    double cost_distinct_links = 0.0;

    bool feasible() const { return report.feasible(); }
};

/// Verify a mapping of a DAG-shaped dataflow: vertex_map assigns each
/// dataflow node a resource node id; edge_routes[i] is the resource route for
/// dag.edges[i]. Same constraint set as the path verifier, with capacity
/// aggregated per resource node and bandwidth checked per DAG edge
/// independently even on shared links.
inline DagReport verify_dag_mapping(const ResourceGraph& graph, const DataflowDag& dag,
                                    const std::map<std::string, std::string>& vertex_map,
                                    const std::vector<std::vector<std::string>>& edge_routes) {
    DagReport out;
    FeasibilityReport& rep = out.report;

    // Resolve the vertex map; unknown names are structure violations.
    std::map<std::string, NodeIndex> placed;
    for (const auto& [job, rid] : vertex_map) {
        auto idx = graph.index_of(rid);
        if (!idx) {
            rep.add(ViolationKind::structure,
                    "dataflow node '" + job + "' mapped to unknown node '" + rid + "'");
            continue;
        }
        placed.emplace(job, *idx);
    }
    for (const auto& [job, req] : dag.comp_reqs)
        if (!placed.count(job))
            rep.add(ViolationKind::structure, "dataflow node '" + job + "' has no mapping");
    if (edge_routes.size() != dag.edges.size())
        rep.add(ViolationKind::structure,
                "expected " + std::to_string(dag.edges.size()) + " edge routes, got " +
                    std::to_string(edge_routes.size()));
    if (!rep.feasible()) return out;

    for (const auto& [job, rid] : dag.source_pins)
        if (placed.count(job) && graph.id_of(placed.at(job)) != rid)
            rep.add(ViolationKind::pin, "source '" + job + "' must be placed on '" + rid + "'");
    for (const auto& [job, rid] : dag.sink_pins)
        if (placed.count(job) && graph.id_of(placed.at(job)) != rid)
            rep.add(ViolationKind::pin, "sink '" + job + "' must be placed on '" + rid + "'");

    std::vector<double> used(graph.node_count(), 0.0);
    for (const auto& [job, req] : dag.comp_reqs) used[placed.at(job)] += req;
    for (NodeIndex v = 0; v < graph.node_count(); ++v)
        if (used[v] > graph.capacity(v))
            rep.add(ViolationKind::capacity, "node '" + graph.id_of(v) + "': requirements " +
                                                 std::to_string(used[v]) + " exceed capacity " +
                                                 std::to_string(graph.capacity(v)));

    std::set<std::size_t> links_used;
    for (std::size_t i = 0; i < dag.edges.size(); ++i) {
        const DagEdge& de = dag.edges[i];
        const std::string where = "dataflow edge " + de.from + "->" + de.to;
        if (!placed.count(de.from) || !placed.count(de.to)) {
            rep.add(ViolationKind::structure, where + ": endpoint has no mapping");
            continue;
        }
        std::vector<NodeIndex> route;
        bool bad = false;
        for (const std::string& rid : edge_routes[i]) {
            auto idx = graph.index_of(rid);
            if (!idx) {
                rep.add(ViolationKind::structure, where + ": route node '" + rid + "' unknown");
                bad = true;
                break;
            }
            route.push_back(*idx);
        }
        if (bad) continue;
        if (route.empty()) {
            rep.add(ViolationKind::structure, where + ": empty route");
            continue;
        }
        if (route.front() != placed.at(de.from))
            rep.add(ViolationKind::continuity, where + ": route does not start at the mapped tail");
        if (route.back() != placed.at(de.to))
            rep.add(ViolationKind::continuity, where + ": route does not end at the mapped head");
        for (std::size_t k = 0; k + 1 < route.size(); ++k) {
            auto link = graph.find_edge(route[k], route[k + 1]);
            if (!link) {
                rep.add(ViolationKind::continuity, where + ": no link " + graph.id_of(route[k]) +
                                                       "-" + graph.id_of(route[k + 1]));
                continue;
            }
            if (graph.edges()[*link].bandwidth < de.bw_req)
                rep.add(ViolationKind::bandwidth,
                        where + ": requirement " + std::to_string(de.bw_req) +
                            " exceeds bandwidth on link " + graph.id_of(route[k]) + "-" +
                            graph.id_of(route[k + 1]));
            out.cost_per_edge_use += graph.edges()[*link].latency;
            links_used.insert(*link);
        }
    }
    for (std::size_t link : links_used) out.cost_distinct_links += graph.edges()[link].latency;
    return out;
}

}  // namespace flowmap
