// Shared test fixtures and independent reference implementations.
//
// Everything in this header re-derives expected behavior from the problem
// constraints alone; none of it calls into the solver's incremental logic,
// so a solver bug cannot hide behind a helper that shares its code path.

#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flowmap/json.hpp"
#include "flowmap/model.hpp"

namespace testsupport {

using flowmap::Block;
using flowmap::DataflowPath;
using flowmap::Instance;
using flowmap::NodeIndex;
using flowmap::PartialMap;
using flowmap::ResourceGraph;

// Triangle fixture used across the suite. Three feasible mappings exist for
// the bundled pipeline, all of cost 2:
//   (A,1)(B,0)(C,2), (A,1)(B,1)(C,1), (A,2)(B,0)(C,1).
// The direct A-C link (latency 5) cannot carry the 3-unit flows.
inline Instance k3_instance() {
    ResourceGraph g;
    NodeIndex a = g.add_node("A", 2.0);
    NodeIndex b = g.add_node("B", 1.0);
    NodeIndex c = g.add_node("C", 2.0);
    g.add_edge(a, b, 5.0, 1.0);
    g.add_edge(b, c, 5.0, 1.0);
    g.add_edge(a, c, 2.0, 5.0);
    DataflowPath p;
    p.comp_reqs = {1.0, 1.0, 1.0};
    p.bw_reqs = {3.0, 3.0};
    p.source_pin = "A";
    p.sink_pin = "C";
    return {std::move(g), std::move(p)};
}

// Same topology, but every link is too narrow for the 3-unit flows.
inline Instance k3_infeasible_instance() {
    Instance inst = k3_instance();
    ResourceGraph g;
    NodeIndex a = g.add_node("A", 2.0);
    NodeIndex b = g.add_node("B", 1.0);
    NodeIndex c = g.add_node("C", 2.0);
    g.add_edge(a, b, 2.0, 1.0);
    g.add_edge(b, c, 2.0, 1.0);
    g.add_edge(a, c, 2.0, 5.0);
    inst.graph = std::move(g);
    return inst;
}

// Two nodes, one link: the only mapping splits the pipeline across the link.
inline Instance two_node_instance() {
    ResourceGraph g;
    NodeIndex a = g.add_node("s", 1.0);
    NodeIndex b = g.add_node("t", 1.0);
    g.add_edge(a, b, 10.0, 3.0);
    DataflowPath p;
    p.comp_reqs = {1.0, 1.0};
    p.bw_reqs = {1.0};
    p.source_pin = "s";
    p.sink_pin = "t";
    return {std::move(g), std::move(p)};
}

// Cycle of n unit-capacity nodes with unit links.
inline ResourceGraph cycle_graph(std::uint32_t n) {
    ResourceGraph g;
    for (std::uint32_t i = 0; i < n; ++i) g.add_node(std::to_string(i), 1.0);
    for (std::uint32_t i = 0; i < n; ++i)
        g.add_edge(i, (i + 1) % n, 1.0, 1.0);
    return g;
}

// Star with a center and n leaves, all unit attributes.
inline ResourceGraph star_graph(std::uint32_t leaves) {
    ResourceGraph g;
    g.add_node("c", 1.0);
    for (std::uint32_t i = 0; i < leaves; ++i) {
        NodeIndex l = g.add_node("l" + std::to_string(i), 1.0);
        g.add_edge(0, l, 1.0, 1.0);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Independent validity checker for partial maps.
//
// A partial map of prefix length L at node v is valid when:
//   * its blocks walk a simple path from the pinned source,
//   * the first block places at least one pipeline node,
//   * block counts sum to L and each block fits the node's capacity,
//   * every hop carries the in-flight pipeline edge within bandwidth,
//   * the sink appears only as the final block of a complete map with a
//     positive count, and never in the interior,
//   * cost equals the sum of hop latencies, accumulated front to back.
// Implemented directly from these rules, not via the solver.

inline bool valid_partial_blocks(const ResourceGraph& g, const DataflowPath& path,
                                 const std::vector<Block>& blocks) {
    if (blocks.empty()) return false;
    const std::size_t p = path.length();
    auto src = g.index_of(path.source_pin);
    auto snk = g.index_of(path.sink_pin);
    if (!src || !snk) return false;
    if (blocks.front().node != *src) return false;
    if (blocks.front().count < 1) return false;

    std::vector<bool> seen(g.node_count(), false);
    std::size_t placed = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Block& b = blocks[i];
        if (b.node >= g.node_count()) return false;
        if (seen[b.node]) return false;
        seen[b.node] = true;
        if (placed + b.count > p) return false;
        double need = 0.0;
        for (std::uint32_t j = 0; j < b.count; ++j) need += path.comp_reqs[placed + j];
        if (need > g.capacity(b.node)) return false;
        placed += b.count;
        if (i + 1 < blocks.size()) {
            auto e = g.find_edge(b.node, blocks[i + 1].node);
            if (!e) return false;
            if (placed < 1 || placed > p - 1) return false;  // some edge must be in flight
            if (path.bw_reqs[placed - 1] > g.edges()[*e].bandwidth) return false;
        }
        // The sink only ever holds the final placements of a complete map.
        if (b.node == *snk) {
            if (i + 1 != blocks.size()) return false;
            if (b.count < 1) return false;
        }
    }
    if (blocks.back().node == *snk && placed != p) return false;
    if (placed == p && blocks.back().node != *snk) return false;  // sink pin
    return true;
}

inline double blocks_cost(const ResourceGraph& g, const std::vector<Block>& blocks) {
    double cost = 0.0;
    for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
        auto e = g.find_edge(blocks[i].node, blocks[i + 1].node);
        cost += g.edges()[*e].latency;
    }
    return cost;
}

// All valid partial maps whose final block sits on `v` with prefix length
// `len`, found by exhaustive recursion over simple paths and block counts.
inline std::vector<PartialMap> enumerate_slot_maps(const ResourceGraph& g,
                                                   const DataflowPath& path, NodeIndex v,
                                                   std::uint32_t len) {
    std::vector<PartialMap> out;
    auto src = g.index_of(path.source_pin);
    if (!src) return out;
    std::vector<Block> blocks;
    std::vector<bool> seen(g.node_count(), false);

    auto emit_if_target = [&]() {
        if (blocks.back().node != v) return;
        std::uint32_t placed = 0;
        for (const Block& b : blocks) placed += b.count;
        if (placed != len) return;
        if (!valid_partial_blocks(g, path, blocks)) return;
        PartialMap m;
        m.blocks = blocks;
        m.prefix_len = placed;
        m.cost = blocks_cost(g, blocks);
        out.push_back(std::move(m));
    };

    const std::uint32_t p = static_cast<std::uint32_t>(path.length());
    // Recurse over (current node, remaining budget), trying every count for
    // the current block and every neighbor for the next hop.
    auto walk = [&](auto&& self, NodeIndex at, std::uint32_t placed_before) -> void {
        std::uint32_t max_here = std::min(p - placed_before, len - placed_before + 0u);
        for (std::uint32_t c = 0; c <= max_here; ++c) {
            blocks.push_back({at, static_cast<std::int32_t>(c)});
            emit_if_target();
            std::uint32_t placed = placed_before + c;
            if (placed < len) {
                for (const auto& adj : g.neighbors(at)) {
                    if (seen[adj.neighbor]) continue;
                    seen[adj.neighbor] = true;
                    self(self, adj.neighbor, placed);
                    seen[adj.neighbor] = false;
                }
            } else if (placed == len && blocks.back().node != v) {
                // Pass-through hops after the last placement still move the
                // map between slots of the same length.
                for (const auto& adj : g.neighbors(at)) {
                    if (seen[adj.neighbor]) continue;
                    seen[adj.neighbor] = true;
                    self(self, adj.neighbor, placed);
                    seen[adj.neighbor] = false;
                }
            }
            blocks.pop_back();
        }
    };
    seen[*src] = true;
    walk(walk, *src, 0);

    std::sort(out.begin(), out.end(), [](const PartialMap& a, const PartialMap& b) {
        return flowmap::blocks_less(a.blocks, b.blocks);
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const PartialMap& a, const PartialMap& b) {
                              return a.blocks == b.blocks;
                          }),
              out.end());
    return out;
}

// Longest simple path from s to t, counted in nodes; 0 when unreachable.
// Plain DFS, independent of the solver and the oracle.
inline std::size_t longest_simple_path_nodes(const ResourceGraph& g, NodeIndex s, NodeIndex t) {
    std::vector<bool> seen(g.node_count(), false);
    std::size_t best = 0;
    auto dfs = [&](auto&& self, NodeIndex at, std::size_t depth) -> void {
        if (at == t) {
            best = std::max(best, depth);
            return;
        }
        for (const auto& adj : g.neighbors(at)) {
            if (seen[adj.neighbor]) continue;
            seen[adj.neighbor] = true;
            self(self, adj.neighbor, depth + 1);
            seen[adj.neighbor] = false;
        }
    };
    seen[s] = true;
    dfs(dfs, s, 1);
    return best;
}

// ---------------------------------------------------------------------------
// Subprocess runner for CLI-level tests.

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string temp_dir() {
    char tmpl[] = "/tmp/flowmap_test_XXXXXX";
    const char* dir = mkdtemp(tmpl);
    return dir != nullptr ? std::string(dir) : std::string("/tmp");
}

// Runs `cli_path args` with optional stdin payload; captures stdout/stderr.
inline CliResult run_cli(const std::string& cli_path, const std::string& args,
                         const std::string& stdin_data = "") {
    static const std::string dir = temp_dir();
    static int counter = 0;
    const std::string tag = dir + "/run" + std::to_string(counter++);
    const std::string in_path = tag + ".in";
    const std::string out_path = tag + ".out";
    const std::string err_path = tag + ".err";
    write_file(in_path, stdin_data);

    std::string cmd = cli_path + " " + args + " < " + in_path + " > " + out_path + " 2> " +
                      err_path;
    int rc = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
    res.out = read_file(out_path);
    res.err = read_file(err_path);
    std::remove(in_path.c_str());
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return res;
}

}  // namespace testsupport
