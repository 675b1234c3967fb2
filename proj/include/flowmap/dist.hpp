// Distributed placement protocol under a deterministic discrete-event
// simulator: nodes exchange partial-placement messages over the resource
// links, delivery delayed by link latency, with per-arrival admission and
// full message accounting.
#pragma once

#include <cassert>
#include <chrono>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "flowmap/exact.hpp"
#include "flowmap/model.hpp"
#include "flowmap/policy.hpp"

namespace flowmap {

struct MapMessage {
    PartialMap map;  // last block is (to, 0): the freshly appended receiver
    NodeIndex from = 0;
    NodeIndex to = 0;
    bool carries_spec = false;  // first message on the from->to link carries the pipeline spec
    double send_time = 0.0;
    double deliver_time = 0.0;  // send_time + link latency
    std::uint64_t seq = 0;      // emission order; the deterministic tiebreaker
};

struct PerNodeStats {
    NodeIndex node = 0;
    std::uint64_t messages_received = 0;
    std::uint64_t messages_emitted = 0;
    std::uint64_t maps_stored = 0;  // slot contents at end of run
    bool seen_spec = false;
};

struct SimConfig {
    SolveMode mode = SolveMode::optimal;
    AdmissionPolicy admission;
    NeighborPolicy neighbors;
    std::uint64_t seed = 0;
    // Safety cap on simulated time; <= 0 derives node_count * max latency + 1,
    // which no simple-path placement can reach.
    double max_simulated_time = 0.0;
};

struct SimResult {
    std::optional<CompleteMapping> best;
    std::optional<PartialMap> best_map;
    std::vector<PartialMap> sink_complete;  // completions stored at the sink, by block sequence
    RunStats stats;
    std::vector<PerNodeStats> per_node;
    bool truncated = false;

    bool feasible() const { return best.has_value(); }
};

using TraceFn = std::function<void(const MapMessage&)>;

/// Event-driven run of the protocol. Messages are processed in
/// (deliver_time, seq) order, which makes every link FIFO and the whole run
/// reproducible; all randomness (neighbor sampling, annealed admission) comes
/// from the seeded generator in that same deterministic order.
class Simulator {
  public:
    Simulator(const ResourceGraph& graph, const DataflowPath& path, SimConfig config,
              TraceFn trace = {})
        : graph_(graph), path_(path), config_(std::move(config)), trace_(std::move(trace)) {
        {
            FeasibilityReport rep = validate_instance(graph, path);
            if (!rep.feasible())
                throw std::invalid_argument("invalid instance: " + rep.violations.front().location);
        }
        if (auto bad = config_.admission.invalid())
            throw std::invalid_argument("admission policy: " + *bad);
        config_.admission = resolve_annealed_t0(config_.admission, graph, path);
        source_ = graph.index_of(path.source_pin).value();
        sink_ = graph.index_of(path.sink_pin).value();
        p_ = static_cast<std::int32_t>(path.length());
        nodes_.resize(graph.node_count());
        for (NodeIndex v = 0; v < graph.node_count(); ++v) {
            nodes_[v].slots.assign(static_cast<std::size_t>(p_) + 1, Slot{});
            nodes_[v].stats.node = v;
        }
        sent_to_.assign(graph.node_count(), std::vector<bool>(graph.node_count(), false));
        stats_.avg_degree = graph.node_count()
                                ? 2.0 * static_cast<double>(graph.edge_count()) /
                                      static_cast<double>(graph.node_count())
                                : 0.0;
        rng_.seed(config_.seed);
        if (config_.max_simulated_time > 0.0) {
            cap_ = config_.max_simulated_time;
        } else {
            double max_lat = 0.0;
            for (const ResourceEdge& e : graph.edges()) max_lat = std::max(max_lat, e.latency);
            cap_ = static_cast<double>(graph.node_count()) * max_lat + 1.0;
        }
    }

    /// Local source initialization plus the first fan-out, all at time zero.
    /// The source owns the requirement spec; it never waits for one.
    void bootstrap() {
        nodes_[source_].stats.seen_spec = true;
        for (PartialMap& m : init_source_maps(graph_, path_)) {
            PartialMap stored = m;
            offer(source_, stored.prefix_len, std::move(stored));
            fan_out(source_, m, 0.0);
        }
    }

    /// Handle one delivered message: admission into the (node, prefix) slot,
    /// then either the sink's completion attempt or fill-and-forward.
    /// Returns the emitted messages (already queued and counted).
    std::vector<MapMessage> process_map(const MapMessage& msg) {
        Node& nd = nodes_[msg.to];
        ++nd.stats.messages_received;
        if (msg.carries_spec) nd.stats.seen_spec = true;
        assert(nd.stats.seen_spec);  // first arrival on any link carries the spec

        const std::int32_t len = msg.map.prefix_len;
        if (!offer(msg.to, len, msg.map)) return {};

        if (msg.to == sink_) {
            ++stats_.extension_attempts;
            auto full = extend(msg.map, p_ - len, sink_, graph_, path_);
            if (full) {
                ++stats_.extensions_succeeded;
                solutions_.push_back(*full);
                offer(sink_, p_, std::move(*full));
                if (config_.mode == SolveMode::first_feasible) done_ = true;
            }
            return {};
        }

        std::vector<MapMessage> out;
        for (std::int32_t x = 0; x <= p_ - len - 1; ++x) {
            ++stats_.extension_attempts;
            auto filled = extend(msg.map, x, msg.to, graph_, path_);
            if (!filled) break;  // requirement prefix sums grow with x
            ++stats_.extensions_succeeded;
            fan_out(msg.to, *filled, msg.deliver_time, &out);
        }
        return out;
    }

    SimResult run() {
        const auto t0 = std::chrono::steady_clock::now();
        bootstrap();
        while (!queue_.empty() && !done_) {
            MapMessage msg = queue_.top();
            if (msg.deliver_time > cap_) {
                truncated_ = true;
                break;
            }
            queue_.pop();
            process_map(msg);
        }

        SimResult result;
        result.truncated = truncated_;
        result.sink_complete = nodes_[sink_].slots[static_cast<std::size_t>(p_)].maps;
        std::sort(
            result.sink_complete.begin(), result.sink_complete.end(),
            [](const PartialMap& a, const PartialMap& b) { return blocks_less(a.blocks, b.blocks); });
        const PartialMap* best = nullptr;
        for (const PartialMap& m : solutions_)
            if (!best || cost_blocks_less(m, *best)) best = &m;
        if (best) {
            result.best_map = *best;
            result.best = to_complete_mapping(*best, path_.length());
        }
        for (Node& nd : nodes_) {
            nd.stats.maps_stored = 0;
            for (const Slot& s : nd.slots) nd.stats.maps_stored += s.size();
            result.per_node.push_back(nd.stats);
        }
        result.stats = stats_;
        result.stats.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        return result;
    }

  private:
    struct Node {
        std::vector<Slot> slots;  // by placed prefix length, 0..p
        PerNodeStats stats;
    };

    struct Later {
        bool operator()(const MapMessage& a, const MapMessage& b) const {
            if (a.deliver_time != b.deliver_time) return a.deliver_time > b.deliver_time;
            return a.seq > b.seq;
        }
    };

    /// Admission under the configured policy; the annealed temperature cools
    /// with the map's hop count. Returns true when the map was stored.
    bool offer(NodeIndex v, std::int32_t len, PartialMap candidate) {
        assert(!check_partial_map(graph_, path_, candidate, source_).has_value());
        const std::int32_t round = static_cast<std::int32_t>(candidate.blocks.size()) - 1;
        Slot& slot = nodes_[v].slots[static_cast<std::size_t>(len)];
        AdmitOutcome res = admit(slot, std::move(candidate), config_.admission, round, rng_);
        if (!res.admitted) {
            ++stats_.maps_discarded;
            return false;
        }
        ++stats_.maps_admitted;
        stats_.maps_discarded += res.evicted;
        current_maps_ += 1;
        current_maps_ -= res.evicted;
        stats_.total_map_count = std::max(stats_.total_map_count, current_maps_);
        stats_.max_slot_size = std::max<std::uint64_t>(stats_.max_slot_size, slot.size());
        return true;
    }

    /// Forward one filled placement to the policy-selected neighbors that are
    /// not already on its path and whose link can carry the in-flight
    /// pipeline edge. Each forwarded copy gets a fresh (neighbor, 0) block.
    void fan_out(NodeIndex u, const PartialMap& filled, double now,
                 std::vector<MapMessage>* out = nullptr) {
        const std::int32_t len = filled.prefix_len;
        assert(len >= 1 && len <= p_ - 1);
        const double bw_need = path_.bw_reqs[static_cast<std::size_t>(len - 1)];
        std::vector<NodeIndex> nbrs;
        nbrs.reserve(graph_.neighbors(u).size());
        for (const AdjEntry& a : graph_.neighbors(u)) nbrs.push_back(a.neighbor);
        for (NodeIndex v : select_neighbors(nbrs, config_.neighbors, rng_)) {
            if (filled.contains(v)) continue;
            const ResourceEdge& link = graph_.edges()[*graph_.find_edge(u, v)];
            if (bw_need > link.bandwidth) continue;
            MapMessage msg;
            msg.map = filled;
            msg.map.cost += link.latency;
            msg.map.blocks.push_back({v, 0});
            msg.from = u;
            msg.to = v;
            msg.carries_spec = !sent_to_[u][v];
            msg.send_time = now;
            msg.deliver_time = now + link.latency;
            msg.seq = seq_++;
            sent_to_[u][v] = true;
            ++nodes_[u].stats.messages_emitted;
            ++stats_.messages_sent;
            if (msg.carries_spec)
                stats_.spec_bytes += (2 * static_cast<std::uint64_t>(p_) - 1) * 8;
            if (trace_) trace_(msg);
            queue_.push(msg);
            if (out) out->push_back(std::move(msg));
        }
    }

    const ResourceGraph& graph_;
    const DataflowPath& path_;
    SimConfig config_;
    TraceFn trace_;
    NodeIndex source_ = 0;
    NodeIndex sink_ = 0;
    std::int32_t p_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::vector<bool>> sent_to_;
    std::priority_queue<MapMessage, std::vector<MapMessage>, Later> queue_;
    std::vector<PartialMap> solutions_;
    RunStats stats_;
    std::uint64_t current_maps_ = 0;
    std::uint64_t seq_ = 0;
    double cap_ = 0.0;
    bool done_ = false;
    bool truncated_ = false;
    Rng rng_;
};

inline SimResult run_simulation(const ResourceGraph& graph, const DataflowPath& path,
                                const SimConfig& config, TraceFn trace = {}) {
    Simulator sim(graph, path, config, std::move(trace));
    return sim.run();
}

}  // namespace flowmap
