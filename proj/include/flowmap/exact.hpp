// Centralized pipeline-placement solver: Bellman-Ford-style relaxation of
// partial placements over the resource network, with pluggable admission and
// neighbor-selection policies.
#pragma once

#include <cassert>
#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "flowmap/model.hpp"
#include "flowmap/policy.hpp"

namespace flowmap {

enum class SolveMode { first_feasible, optimal };

struct SolverConfig {
    SolveMode mode = SolveMode::optimal;
    AdmissionPolicy admission;
    NeighborPolicy neighbors;
    std::uint64_t seed = 0;
    // Keeping relaxed maps suppresses duplicate re-admission; dropping them
    // caps memory at the cost of possible duplicate work.
    bool retain_old = true;
    std::optional<std::uint32_t> max_iterations;  // default: node_count - 1
};

struct SolveResult {
    std::optional<CompleteMapping> best;
    std::optional<PartialMap> best_map;
    std::vector<PartialMap> all_at_sink;  // sorted by block sequence
    RunStats stats;

    bool feasible() const { return best.has_value(); }
};

/// Seed placements: the first L pipeline nodes on the source, for every L
/// whose cumulative requirement fits the source capacity (L < p; the final
/// pipeline node is only ever placed by a sink completion).
inline std::vector<PartialMap> init_source_maps(const ResourceGraph& graph,
                                                const DataflowPath& path) {
    std::vector<PartialMap> out;
    auto src = graph.index_of(path.source_pin);
    if (!src) return out;
    const std::int32_t p = static_cast<std::int32_t>(path.length());
    double need = 0.0;
    for (std::int32_t len = 1; len <= p - 1; ++len) {
        need += path.comp_reqs[static_cast<std::size_t>(len - 1)];
        if (need > graph.capacity(*src)) break;
        PartialMap m;
        m.blocks = {{*src, len}};
        m.prefix_len = len;
        m.cost = 0.0;
        m.sweep = 0;
        out.push_back(std::move(m));
    }
    return out;
}

/// Place the next x pipeline nodes on v, extending m. Fails (empty optional)
/// when their summed requirement exceeds v's capacity. Appending a new block
/// pays the connecting link's latency; filling the trailing block (v already
/// m's last node, used by the distributed protocol) pays nothing because the
/// hop was paid when the block was appended.
inline std::optional<PartialMap> extend(const PartialMap& m, std::int32_t x, NodeIndex v,
                                        const ResourceGraph& graph, const DataflowPath& path) {
    const std::int32_t j = m.prefix_len;
    assert(j + x <= static_cast<std::int32_t>(path.length()));
    double need = 0.0;
    for (std::int32_t k = j; k < j + x; ++k) need += path.comp_reqs[static_cast<std::size_t>(k)];
    if (need > graph.capacity(v)) return std::nullopt;
    PartialMap out = m;
    if (v == m.last_node()) {
        out.blocks.back().count += x;
    } else {
        auto link = graph.find_edge(m.last_node(), v);
        assert(link.has_value());
        out.cost += graph.edges()[*link].latency;
        out.blocks.push_back({v, x});
    }
    out.prefix_len += x;
    return out;
}

/// Solver working set: one slot per (node, placed-prefix-length) pair plus
/// run counters. `sweep` is the current relaxation round; a stored map is
/// fresh exactly when it was admitted in the previous round.
struct SolverState {
    const ResourceGraph& graph;
    const DataflowPath& path;
    SolverConfig config;
    NodeIndex source = 0;
    NodeIndex sink = 0;
    std::int32_t p = 0;
    std::vector<std::vector<Slot>> slots;  // [node][prefix_len], lengths 0..p
    RunStats stats;
    std::int32_t sweep = 0;
    std::uint64_t current_maps = 0;
    bool complete_admitted = false;
    Rng rng;

    SolverState(const ResourceGraph& g, const DataflowPath& pa, SolverConfig cfg)
        : graph(g), path(pa), config(std::move(cfg)) {
        config.admission = resolve_annealed_t0(config.admission, g, pa);
        source = graph.index_of(path.source_pin).value();
        sink = graph.index_of(path.sink_pin).value();
        p = static_cast<std::int32_t>(path.length());
        slots.assign(graph.node_count(), std::vector<Slot>(static_cast<std::size_t>(p) + 1));
        stats.avg_degree = graph.node_count()
                               ? 2.0 * static_cast<double>(graph.edge_count()) /
                                     static_cast<double>(graph.node_count())
                               : 0.0;
        rng.seed(config.seed);
    }

    Slot& slot(NodeIndex v, std::int32_t len) { return slots[v][static_cast<std::size_t>(len)]; }

    /// Offer a candidate to (v, len) under the admission policy, keeping the
    /// counters in step. Returns 1 when admitted.
    std::uint32_t offer(NodeIndex v, std::int32_t len, PartialMap candidate) {
        assert(!check_partial_map(graph, path, candidate, source).has_value());
        candidate.sweep = sweep;
        AdmitOutcome res = admit(slot(v, len), std::move(candidate), config.admission, sweep, rng);
        if (!res.admitted) {
            ++stats.maps_discarded;
            return 0;
        }
        ++stats.maps_admitted;
        stats.maps_discarded += res.evicted;
        current_maps += 1;
        current_maps -= res.evicted;
        stats.total_map_count = std::max(stats.total_map_count, current_maps);
        stats.max_slot_size = std::max<std::uint64_t>(stats.max_slot_size, slot(v, len).size());
        if (v == sink && len == p) complete_admitted = true;
        return 1;
    }
};

/// Push every fresh placement at u across the link (u, v): pass-through and
/// partial fills toward ordinary nodes, the full completion toward the sink.
/// Gated by the in-flight pipeline edge's bandwidth requirement. Returns the
/// number of admitted extensions.
inline std::uint32_t relax(NodeIndex u, NodeIndex v, SolverState& state) {
    const ResourceGraph& graph = state.graph;
    const DataflowPath& path = state.path;
    ++state.stats.relax_calls;
    auto link = graph.find_edge(u, v);
    assert(link.has_value());
    const double bw = graph.edges()[*link].bandwidth;
    const std::int32_t p = state.p;
    std::uint32_t admitted = 0;
    for (std::int32_t len = 1; len <= p - 1; ++len) {
        Slot& at_u = state.slot(u, len);
        if (at_u.empty()) continue;
        if (path.bw_reqs[static_cast<std::size_t>(len - 1)] > bw) continue;
        // Admissions land at v, never back at u, so iterating by index is safe.
        for (std::size_t i = 0; i < at_u.maps.size(); ++i) {
            const PartialMap& m = at_u.maps[i];
            if (m.sweep != state.sweep - 1) continue;  // only fresh maps relax
            if (m.contains(v)) continue;               // resource paths stay simple
            if (v == state.sink) {
                ++state.stats.extension_attempts;
                auto ext = extend(m, p - len, v, graph, path);
                if (ext) {
                    ++state.stats.extensions_succeeded;
                    admitted += state.offer(v, p, std::move(*ext));
                }
            } else {
                for (std::int32_t x = 0; x <= p - len - 1; ++x) {
                    ++state.stats.extension_attempts;
                    auto ext = extend(m, x, v, graph, path);
                    // Requirement prefix sums grow with x; the first failure
                    // ends the fill ladder.
                    if (!ext) break;
                    ++state.stats.extensions_succeeded;
                    admitted += state.offer(v, len + x, std::move(*ext));
                }
            }
        }
    }
    return admitted;
}

/// Full solve: seed the source, then sweep every directed link orientation
/// (sorted, both directions) up to node_count - 1 times, stopping early at a
/// fixed point, or at the first sink completion in first_feasible mode.
inline SolveResult pathmap(const ResourceGraph& graph, const DataflowPath& path,
                           const SolverConfig& config) {
    {
        FeasibilityReport rep = validate_instance(graph, path);
        if (!rep.feasible())
            throw std::invalid_argument("invalid instance: " + rep.violations.front().location);
    }
    if (auto bad = config.admission.invalid())
        throw std::invalid_argument("admission policy: " + *bad);
    if (config.max_iterations && *config.max_iterations < 1)
        throw std::invalid_argument("max_iterations must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();
    SolverState state(graph, path, config);
    SolveResult result;

    state.sweep = 0;
    for (PartialMap& m : init_source_maps(graph, path))
        state.offer(state.source, m.prefix_len, std::move(m));

    std::vector<std::pair<NodeIndex, NodeIndex>> directed;
    directed.reserve(graph.edge_count() * 2);
    for (const ResourceEdge& e : graph.edges()) {
        directed.emplace_back(e.u, e.v);
        directed.emplace_back(e.v, e.u);
    }
    std::sort(directed.begin(), directed.end());

    const std::uint32_t max_sweeps =
        config.max_iterations.value_or(static_cast<std::uint32_t>(
            graph.node_count() > 0 ? graph.node_count() - 1 : 0));
    const bool sampled = state.config.neighbors.kind == NeighborKind::random_k;
    std::vector<std::vector<NodeIndex>> selected(sampled ? graph.node_count() : 0);

    for (std::uint32_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        state.sweep = static_cast<std::int32_t>(sweep);
        state.stats.iterations_used = sweep;
        if (sampled) {
            for (NodeIndex u = 0; u < graph.node_count(); ++u) {
                std::vector<NodeIndex> nbrs;
                nbrs.reserve(graph.neighbors(u).size());
                for (const AdjEntry& a : graph.neighbors(u)) nbrs.push_back(a.neighbor);
                selected[u] = select_neighbors(nbrs, state.config.neighbors, state.rng);
            }
        }
        std::uint32_t sweep_admitted = 0;
        bool stop = false;
        for (const auto& [u, v] : directed) {
            if (sampled && !std::binary_search(selected[u].begin(), selected[u].end(), v))
                continue;
            sweep_admitted += relax(u, v, state);
            if (config.mode == SolveMode::first_feasible && state.complete_admitted) {
                stop = true;
                break;
            }
        }
        if (stop) break;
        if (!state.config.retain_old) {
            // The maps relaxed this sweep are spent; completions at the sink
            // are results and stay.
            for (NodeIndex w = 0; w < graph.node_count(); ++w)
                for (std::int32_t len = 1; len <= state.p - 1; ++len) {
                    Slot& s = state.slot(w, len);
                    for (std::size_t i = s.maps.size(); i-- > 0;)
                        if (s.maps[i].sweep <= state.sweep - 1) {
                            s.erase(i);
                            --state.current_maps;
                        }
                }
        }
        if (sweep_admitted == 0) break;
    }

    result.all_at_sink = state.slot(state.sink, state.p).maps;
    std::sort(result.all_at_sink.begin(), result.all_at_sink.end(),
              [](const PartialMap& a, const PartialMap& b) { return blocks_less(a.blocks, b.blocks); });
    const PartialMap* best = nullptr;
    for (const PartialMap& m : result.all_at_sink)
        if (!best || cost_blocks_less(m, *best)) best = &m;
    if (best) {
        result.best_map = *best;
        result.best = to_complete_mapping(*best, path.length());
    }
    result.stats = state.stats;
    result.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace flowmap
