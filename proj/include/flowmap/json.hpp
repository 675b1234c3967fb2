// JSON wire formats. Field names here are the normative external schema;
// parse errors name the offending field.
#pragma once

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

#include "flowmap/model.hpp"

namespace flowmap {

using json = nlohmann::json;

/// Raised for malformed input documents; the message names the bad field.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object()) throw FormatError(ctx + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(ctx + ": missing field '" + key + "'");
    return *it;
}

inline double as_number(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw FormatError(ctx + ": expected a number");
    return j.get<double>();
}

inline std::string as_string(const json& j, const std::string& ctx) {
    if (!j.is_string()) throw FormatError(ctx + ": expected a string");
    return j.get<std::string>();
}

inline const json& as_array(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw FormatError(ctx + ": expected an array");
    return j;
}

}  // namespace detail

// --- instance document ------------------------------------------------------

inline json graph_to_json(const ResourceGraph& g) {
    json nodes = json::array();
    for (const ResourceNode& n : g.nodes())
        nodes.push_back({{"id", n.id}, {"capacity", n.capacity}});
    json edges = json::array();
    for (const ResourceEdge& e : g.edges())
        edges.push_back({{"u", g.id_of(e.u)},
                         {"v", g.id_of(e.v)},
                         {"bandwidth", e.bandwidth},
                         {"latency", e.latency}});
    return {{"nodes", nodes}, {"edges", edges}};
}

inline ResourceGraph graph_from_json(const json& j, const std::string& ctx = "graph") {
    using namespace detail;
    ResourceGraph g;
    const json& nodes = as_array(require(j, "nodes", ctx), ctx + ".nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string nctx = ctx + ".nodes[" + std::to_string(i) + "]";
        std::string id = as_string(require(nodes[i], "id", nctx), nctx + ".id");
        double cap = as_number(require(nodes[i], "capacity", nctx), nctx + ".capacity");
        try {
            g.add_node(std::move(id), cap);
        } catch (const std::invalid_argument& e) {
            throw FormatError(nctx + ": " + e.what());
        }
    }
    const json& edges = as_array(require(j, "edges", ctx), ctx + ".edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string ectx = ctx + ".edges[" + std::to_string(i) + "]";
        std::string u = as_string(require(edges[i], "u", ectx), ectx + ".u");
        std::string v = as_string(require(edges[i], "v", ectx), ectx + ".v");
        auto ui = g.index_of(u), vi = g.index_of(v);
        if (!ui) throw FormatError(ectx + ".u: unknown node '" + u + "'");
        if (!vi) throw FormatError(ectx + ".v: unknown node '" + v + "'");
        double bw = as_number(require(edges[i], "bandwidth", ectx), ectx + ".bandwidth");
        double lat = as_number(require(edges[i], "latency", ectx), ectx + ".latency");
        try {
            g.add_edge(*ui, *vi, bw, lat);
        } catch (const std::invalid_argument& e) {
            throw FormatError(ectx + ": " + e.what());
        }
    }
    return g;
}

inline json path_to_json(const DataflowPath& p) {
    return {{"comp_reqs", p.comp_reqs},
            {"bw_reqs", p.bw_reqs},
            {"source_pin", p.source_pin},
            {"sink_pin", p.sink_pin}};
}

inline DataflowPath path_from_json(const json& j, const std::string& ctx = "path") {
    using namespace detail;
    DataflowPath p;
    const json& creqs = as_array(require(j, "comp_reqs", ctx), ctx + ".comp_reqs");
    for (std::size_t i = 0; i < creqs.size(); ++i)
        p.comp_reqs.push_back(as_number(creqs[i], ctx + ".comp_reqs[" + std::to_string(i) + "]"));
    const json& breqs = as_array(require(j, "bw_reqs", ctx), ctx + ".bw_reqs");
    for (std::size_t i = 0; i < breqs.size(); ++i)
        p.bw_reqs.push_back(as_number(breqs[i], ctx + ".bw_reqs[" + std::to_string(i) + "]"));
    p.source_pin = as_string(require(j, "source_pin", ctx), ctx + ".source_pin");
    p.sink_pin = as_string(require(j, "sink_pin", ctx), ctx + ".sink_pin");
    return p;
}

struct Instance {
    ResourceGraph graph;
    DataflowPath path;
};

inline json instance_to_json(const Instance& inst) {
    return {{"graph", graph_to_json(inst.graph)}, {"path", path_to_json(inst.path)}};
}

inline Instance instance_from_json(const json& j) {
    using namespace detail;
    Instance inst;
    inst.graph = graph_from_json(require(j, "graph", "instance"));
    inst.path = path_from_json(require(j, "path", "instance"));
    return inst;
}

// --- mapping document -------------------------------------------------------

inline json mapping_to_json(const ResourceGraph& g, const CompleteMapping& m) {
    json vm = json::array();
    for (NodeIndex n : m.vertex_map) vm.push_back(g.id_of(n));
    json em = json::array();
    for (const auto& path : m.edge_map) {
        json pj = json::array();
        for (NodeIndex n : path) pj.push_back(g.id_of(n));
        em.push_back(std::move(pj));
    }
    return {{"vertex_map", vm}, {"edge_map", em}, {"cost", m.cost}};
}

/// Decode a mapping document. A document without "edge_map" is a vertex-only
/// mapping (second result element false); callers may synthesize routes.
/// An unknown node id is reported in the FeasibilityReport out-parameter
/// rather than thrown: such a mapping is well-formed JSON, just infeasible.
inline std::optional<CompleteMapping> mapping_from_json(const ResourceGraph& g, const json& j,
                                                        bool& has_edge_map,
                                                        FeasibilityReport& rep) {
    using namespace detail;
    CompleteMapping m;
    const std::string ctx = "mapping";
    const json& vm = as_array(require(j, "vertex_map", ctx), ctx + ".vertex_map");
    for (std::size_t i = 0; i < vm.size(); ++i) {
        std::string id = as_string(vm[i], ctx + ".vertex_map[" + std::to_string(i) + "]");
        auto idx = g.index_of(id);
        if (!idx) {
            rep.add(ViolationKind::structure,
                    "vertex_map[" + std::to_string(i) + "]: unknown node '" + id + "'");
            return std::nullopt;
        }
        m.vertex_map.push_back(*idx);
    }
    has_edge_map = j.contains("edge_map");
    if (has_edge_map) {
        const json& em = as_array(j["edge_map"], ctx + ".edge_map");
        for (std::size_t e = 0; e < em.size(); ++e) {
            const std::string ectx = ctx + ".edge_map[" + std::to_string(e) + "]";
            const json& pj = as_array(em[e], ectx);
            std::vector<NodeIndex> path;
            for (std::size_t k = 0; k < pj.size(); ++k) {
                std::string id = as_string(pj[k], ectx + "[" + std::to_string(k) + "]");
                auto idx = g.index_of(id);
                if (!idx) {
                    rep.add(ViolationKind::structure,
                            ectx + "[" + std::to_string(k) + "]: unknown node '" + id + "'");
                    return std::nullopt;
                }
                path.push_back(*idx);
            }
            m.edge_map.push_back(std::move(path));
        }
    }
    if (j.contains("cost")) m.cost = as_number(j["cost"], ctx + ".cost");
    return m;
}

// --- reports, stats, trace --------------------------------------------------

inline json report_to_json(const FeasibilityReport& rep) {
    json viols = json::array();
    for (const Violation& v : rep.violations)
        viols.push_back({{"kind", to_string(v.kind)}, {"location", v.location}});
    return {{"feasible", rep.feasible()}, {"violations", viols}};
}

inline json stats_to_json(const RunStats& s) {
    return {{"relax_calls", s.relax_calls},
            {"extension_attempts", s.extension_attempts},
            {"extensions_succeeded", s.extensions_succeeded},
            {"maps_admitted", s.maps_admitted},
            {"maps_discarded", s.maps_discarded},
            {"max_slot_size", s.max_slot_size},
            {"total_map_count", s.total_map_count},
            {"iterations_used", s.iterations_used},
            {"messages_sent", s.messages_sent},
            {"spec_bytes", s.spec_bytes},
            {"avg_degree", s.avg_degree},
            {"wall_ms", s.wall_ms}};
}

inline json partial_map_to_json(const ResourceGraph& g, const PartialMap& m) {
    json blocks = json::array();
    for (const Block& b : m.blocks) blocks.push_back({g.id_of(b.node), b.count});
    return {{"blocks", blocks}, {"prefix_len", m.prefix_len}, {"cost", m.cost}};
}

inline PartialMap partial_map_from_json(const ResourceGraph& g, const json& j,
                                        const std::string& ctx = "partial_map") {
    using namespace detail;
    PartialMap m;
    const json& blocks = as_array(require(j, "blocks", ctx), ctx + ".blocks");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const std::string bctx = ctx + ".blocks[" + std::to_string(i) + "]";
        const json& b = as_array(blocks[i], bctx);
        if (b.size() != 2) throw FormatError(bctx + ": expected [id, count]");
        std::string id = as_string(b[0], bctx + "[0]");
        auto idx = g.index_of(id);
        if (!idx) throw FormatError(bctx + "[0]: unknown node '" + id + "'");
        m.blocks.push_back({*idx, static_cast<std::int32_t>(as_number(b[1], bctx + "[1]"))});
    }
    m.prefix_len = static_cast<std::int32_t>(
        as_number(require(j, "prefix_len", ctx), ctx + ".prefix_len"));
    m.cost = as_number(require(j, "cost", ctx), ctx + ".cost");
    return m;
}

}  // namespace flowmap
