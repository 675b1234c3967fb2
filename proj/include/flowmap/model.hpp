// Domain types shared by every flowmap component: the capacitated resource
// network, the linear dataflow pipeline to be placed on it, partial and
// complete placements, feasibility reports, and run counters.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace flowmap {

using NodeIndex = std::uint32_t;

struct ResourceNode {
    std::string id;
    double capacity = 0.0;  // available compute units

    bool operator==(const ResourceNode&) const = default;
};

struct ResourceEdge {
    NodeIndex u = 0;
    NodeIndex v = 0;
    double bandwidth = 0.0;  // flow units
    double latency = 0.0;    // additive cost units

    bool operator==(const ResourceEdge&) const = default;
};

struct AdjEntry {
    NodeIndex neighbor;
    std::size_t edge;  // index into edges()
};

/// Undirected capacitated network. Nodes carry compute capacity, links carry
/// bandwidth and additive latency. Structural invariants (no self-loops, at
/// most one link per node pair, declared endpoints) are enforced at
/// construction; value-range checks are left to validate_instance so that
/// malformed values can be *reported* rather than thrown.
class ResourceGraph {
  public:
    NodeIndex add_node(std::string id, double capacity) {
        if (index_.count(id))
            throw std::invalid_argument("duplicate node id '" + id + "'");
        NodeIndex idx = static_cast<NodeIndex>(nodes_.size());
        index_.emplace(id, idx);
        nodes_.push_back({std::move(id), capacity});
        adj_.emplace_back();
        return idx;
    }

    std::size_t add_edge(NodeIndex u, NodeIndex v, double bandwidth, double latency) {
        if (u >= nodes_.size() || v >= nodes_.size())
            throw std::invalid_argument("edge endpoint out of range");
        if (u == v)
            throw std::invalid_argument("self-loop edge on node '" + nodes_[u].id + "'");
        if (find_edge(u, v))
            throw std::invalid_argument("duplicate edge " + nodes_[u].id + "-" + nodes_[v].id);
        std::size_t e = edges_.size();
        edges_.push_back({u, v, bandwidth, latency});
        insert_adj(u, v, e);
        insert_adj(v, u, e);
        return e;
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<ResourceNode>& nodes() const { return nodes_; }
    const std::vector<ResourceEdge>& edges() const { return edges_; }

    const std::string& id_of(NodeIndex i) const { return nodes_[i].id; }
    double capacity(NodeIndex i) const { return nodes_[i].capacity; }

    std::optional<NodeIndex> index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Adjacency of u, sorted by neighbor index (deterministic iteration
    /// regardless of edge declaration order).
    const std::vector<AdjEntry>& neighbors(NodeIndex u) const { return adj_[u]; }

    std::optional<std::size_t> find_edge(NodeIndex u, NodeIndex v) const {
        for (const AdjEntry& a : adj_[u])
            if (a.neighbor == v) return a.edge;
        return std::nullopt;
    }

    bool operator==(const ResourceGraph& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_;
    }

  private:
    void insert_adj(NodeIndex from, NodeIndex to, std::size_t e) {
        auto& vec = adj_[from];
        auto pos = std::lower_bound(vec.begin(), vec.end(), to,
                                    [](const AdjEntry& a, NodeIndex n) { return a.neighbor < n; });
        vec.insert(pos, {to, e});
    }

    std::vector<ResourceNode> nodes_;
    std::vector<ResourceEdge> edges_;
    std::vector<std::vector<AdjEntry>> adj_;
    std::unordered_map<std::string, NodeIndex> index_;
};

/// Linear pipeline: comp_reqs[i] is the compute requirement of pipeline node
/// i (0 = source, p-1 = sink); bw_reqs[i] the bandwidth requirement of the
/// pipeline edge (i, i+1). Source and sink placement is pinned.
struct DataflowPath {
    std::vector<double> comp_reqs;
    std::vector<double> bw_reqs;
    std::string source_pin;
    std::string sink_pin;

    std::size_t length() const { return comp_reqs.size(); }

    bool operator==(const DataflowPath&) const = default;
};

struct DagEdge {
    std::string from;
    std::string to;
    double bw_req = 0.0;

    bool operator==(const DagEdge&) const = default;
};

/// General DAG-shaped dataflow, used by the feasibility verifier only.
/// source_pins / sink_pins map designated job nodes to resource node ids.
struct DataflowDag {
    std::map<std::string, double> comp_reqs;
    std::vector<DagEdge> edges;
    std::map<std::string, std::string> source_pins;
    std::map<std::string, std::string> sink_pins;

    bool operator==(const DataflowDag&) const = default;
};

// ---------------------------------------------------------------------------
// Placements

struct Block {
    NodeIndex node = 0;
    std::int32_t count = 0;  // pipeline nodes hosted by this resource node

    bool operator==(const Block&) const = default;
};

/// A feasible placement of the first prefix_len pipeline nodes along a simple
/// resource path. Blocks with count 0 are pass-through hops: the same
/// pipeline edge stays in flight across them, which is how one pipeline edge
/// maps onto a multi-hop resource path.
///
/// `sweep` records the relaxation sweep (0 = initialization) in which the map
/// was admitted; a map is "fresh" for exactly the sweep after its admission
/// and old afterwards. A plain consumed-on-relax flag would be wrong: a fresh
/// map must be relaxed across *every* incident edge of one full sweep.
struct PartialMap {
    std::vector<Block> blocks;
    std::int32_t prefix_len = 0;  // == sum of block counts
    double cost = 0.0;
    std::int32_t sweep = 0;

    NodeIndex last_node() const { return blocks.back().node; }

    bool contains(NodeIndex n) const {
        for (const Block& b : blocks)
            if (b.node == n) return true;
        return false;
    }

    bool operator==(const PartialMap& o) const {
        return blocks == o.blocks && prefix_len == o.prefix_len && cost == o.cost;
    }
};

/// Lexicographic order on block sequences; the deterministic tie-break used
/// whenever two placements have equal cost.
inline bool blocks_less(const std::vector<Block>& a, const std::vector<Block>& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(), [](const Block& x, const Block& y) {
            return x.node != y.node ? x.node < y.node : x.count < y.count;
        });
}

inline bool cost_blocks_less(const PartialMap& a, const PartialMap& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return blocks_less(a.blocks, b.blocks);
}

/// Full placement: vertex_map[i] hosts pipeline node i; edge_map[e] is the
/// resource path carrying pipeline edge e (a singleton list is a zero-length
/// path: both endpoints co-located, infinite bandwidth, zero latency).
struct CompleteMapping {
    std::vector<NodeIndex> vertex_map;
    std::vector<std::vector<NodeIndex>> edge_map;
    double cost = 0.0;

    bool operator==(const CompleteMapping&) const = default;
};

/// Expand a finished PartialMap (prefix_len == pipeline length) into the
/// explicit vertex/edge mapping form. Purely mechanical; enforces nothing.
inline CompleteMapping to_complete_mapping(const PartialMap& m, std::size_t p) {
    if (m.prefix_len != static_cast<std::int32_t>(p))
        throw std::invalid_argument("to_complete_mapping: map is not complete");
    CompleteMapping out;
    out.cost = m.cost;
    out.vertex_map.reserve(p);
    for (const Block& b : m.blocks)
        for (std::int32_t k = 0; k < b.count; ++k)
            out.vertex_map.push_back(b.node);
    out.edge_map.resize(p >= 1 ? p - 1 : 0);
    for (std::size_t e = 0; e + 1 < p; ++e)
        out.edge_map[e].push_back(out.vertex_map[e]);
    std::int64_t placed = 0;
    for (std::size_t i = 0; i + 1 < m.blocks.size(); ++i) {
        placed += m.blocks[i].count;
        // hop i -> i+1 carries the pipeline edge left in flight after `placed`
        out.edge_map[placed - 1].push_back(m.blocks[i + 1].node);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Feasibility reporting

enum class ViolationKind { pin, capacity, bandwidth, continuity, structure };

inline const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::pin: return "pin";
        case ViolationKind::capacity: return "capacity";
        case ViolationKind::bandwidth: return "bandwidth";
        case ViolationKind::continuity: return "continuity";
        case ViolationKind::structure: return "structure";
    }
    return "unknown";
}

struct Violation {
    ViolationKind kind;
    std::string location;

    bool operator==(const Violation&) const = default;
};

struct FeasibilityReport {
    std::vector<Violation> violations;

    bool feasible() const { return violations.empty(); }

    void add(ViolationKind kind, std::string location) {
        violations.push_back({kind, std::move(location)});
    }

    bool operator==(const FeasibilityReport&) const = default;
};

/// Counters observable from a solver or simulator run. All counters are
/// monotone while a run is in progress; total_map_count tracks the peak
/// number of simultaneously stored partial maps and max_slot_size the peak
/// size of any single (node, prefix-length) slot.
struct RunStats {
    std::uint64_t relax_calls = 0;
    std::uint64_t extension_attempts = 0;
    std::uint64_t extensions_succeeded = 0;
    std::uint64_t maps_admitted = 0;
    std::uint64_t maps_discarded = 0;
    std::uint64_t max_slot_size = 0;
    std::uint64_t total_map_count = 0;
    std::uint64_t iterations_used = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t spec_bytes = 0;
    double avg_degree = 0.0;
    double wall_ms = 0.0;
};

// ---------------------------------------------------------------------------
// Instance validation

inline bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

/// Structural validation of a (graph, pipeline) instance. Reports problems,
/// never throws; does not decide solvability.
inline FeasibilityReport validate_instance(const ResourceGraph& graph, const DataflowPath& path) {
    FeasibilityReport rep;
    for (const ResourceNode& n : graph.nodes())
        if (!finite_nonneg(n.capacity))
            rep.add(ViolationKind::capacity, "node '" + n.id + "': capacity must be finite and >= 0");
    for (const ResourceEdge& e : graph.edges()) {
        const std::string where = graph.id_of(e.u) + "-" + graph.id_of(e.v);
        if (!finite_nonneg(e.bandwidth))
            rep.add(ViolationKind::bandwidth, "edge " + where + ": bandwidth must be finite and >= 0");
        if (!finite_nonneg(e.latency))
            rep.add(ViolationKind::structure, "edge " + where + ": latency must be finite and >= 0");
    }
    const std::size_t p = path.length();
    if (p < 2)
        rep.add(ViolationKind::structure, "pipeline must have at least 2 nodes, got " + std::to_string(p));
    if (path.bw_reqs.size() + 1 != p && p >= 1)
        rep.add(ViolationKind::structure,
                "pipeline with " + std::to_string(p) + " nodes needs " + std::to_string(p - 1) +
                    " bandwidth requirements, got " + std::to_string(path.bw_reqs.size()));
    for (std::size_t i = 0; i < path.comp_reqs.size(); ++i)
        if (!finite_nonneg(path.comp_reqs[i]))
            rep.add(ViolationKind::capacity,
                    "comp_reqs[" + std::to_string(i) + "] must be finite and >= 0");
    for (std::size_t i = 0; i < path.bw_reqs.size(); ++i)
        if (!finite_nonneg(path.bw_reqs[i]))
            rep.add(ViolationKind::bandwidth,
                    "bw_reqs[" + std::to_string(i) + "] must be finite and >= 0");
    if (!graph.index_of(path.source_pin))
        rep.add(ViolationKind::pin, "source_pin '" + path.source_pin + "' is not a declared node");
    if (!graph.index_of(path.sink_pin))
        rep.add(ViolationKind::pin, "sink_pin '" + path.sink_pin + "' is not a declared node");
    if (path.source_pin == path.sink_pin)
        rep.add(ViolationKind::structure, "source_pin and sink_pin must differ");
    return rep;
}

/// Check every PartialMap invariant against an instance. Returns an empty
/// optional when the map is well formed, else a description of the first
/// violation. Used by debug assertions in the solvers and by tests.
inline std::optional<std::string> check_partial_map(const ResourceGraph& graph,
                                                    const DataflowPath& path, const PartialMap& m,
                                                    NodeIndex source) {
    const std::int64_t p = static_cast<std::int64_t>(path.length());
    if (m.blocks.empty()) return "no blocks";
    if (m.blocks.front().node != source) return "first block is not on the source pin";
    if (m.blocks.front().count < 1) return "first block count must be >= 1";
    std::int64_t placed = 0;
    double cost = 0.0;
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        const Block& b = m.blocks[i];
        if (b.node >= graph.node_count()) return "block node out of range";
        if (b.count < 0) return "negative block count";
        for (std::size_t j = 0; j < i; ++j)
            if (m.blocks[j].node == b.node) return "resource node revisited";
        double creq = 0.0;
        for (std::int64_t k = placed; k < placed + b.count; ++k) {
            if (k >= p) return "more pipeline nodes placed than exist";
            creq += path.comp_reqs[static_cast<std::size_t>(k)];
        }
        if (creq > graph.capacity(b.node)) return "block exceeds node capacity";
        placed += b.count;
        if (i + 1 < m.blocks.size()) {
            auto e = graph.find_edge(b.node, m.blocks[i + 1].node);
            if (!e) return "consecutive blocks not adjacent";
            if (placed < 1 || placed > p - 1) return "no pipeline edge in flight across a hop";
            if (path.bw_reqs[static_cast<std::size_t>(placed - 1)] > graph.edges()[*e].bandwidth)
                return "in-flight pipeline edge exceeds link bandwidth";
            cost += graph.edges()[*e].latency;
        }
    }
    if (placed != m.prefix_len) return "prefix_len does not match block counts";
    if (m.prefix_len < 1 || m.prefix_len > p) return "prefix_len out of range";
    if (cost != m.cost) return "cost does not match traversed latencies";
    return std::nullopt;
}

}  // namespace flowmap
