// Admission (slot pruning) and neighbor-selection policies, shared by the
// centralized solver and the distributed simulator, plus the deterministic
// RNG helpers every randomized component uses.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_map>

#include "flowmap/model.hpp"

namespace flowmap {

// std::mt19937_64 output is fully specified by the standard; the helpers
// below avoid std::uniform_*_distribution, whose draws are not portable.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1), 53 random bits.
inline double u01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform index in [0, m). Modulo bias is negligible for the small m used
/// here and determinism matters more than perfect uniformity.
inline std::size_t uniform_index(Rng& rng, std::size_t m) {
    return static_cast<std::size_t>(rng() % m);
}

/// splitmix64 step; used to derive independent streams from one user seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// ---------------------------------------------------------------------------
// Policies

enum class AdmissionKind { keep_all, least_cost, annealed };

struct AdmissionPolicy {
    AdmissionKind kind = AdmissionKind::keep_all;
    double t0 = 0.0;             // annealed initial temperature; <= 0 asks for the default
    double alpha = 0.9;          // annealed geometric cooling factor
    std::uint32_t max_slot = 4;  // annealed per-slot bound

    static AdmissionPolicy keep_all() { return {}; }
    static AdmissionPolicy least_cost() { return {AdmissionKind::least_cost}; }
    static AdmissionPolicy annealed(double t0 = 0.0, double alpha = 0.9,
                                    std::uint32_t max_slot = 4) {
        return {AdmissionKind::annealed, t0, alpha, max_slot};
    }

    std::optional<std::string> invalid() const {
        if (kind != AdmissionKind::annealed) return std::nullopt;
        if (!(alpha > 0.0 && alpha < 1.0)) return "alpha must be in (0, 1)";
        if (max_slot < 1) return "max_slot must be >= 1";
        if (std::isnan(t0)) return "t0 must not be NaN";
        if (t0 > 0.0 && !std::isfinite(t0)) return "t0 must be finite";
        return std::nullopt;
    }
};

/// Fill in the instance-derived default temperature (mean link latency scaled
/// by the pipeline length) when the caller left t0 unset.
inline AdmissionPolicy resolve_annealed_t0(AdmissionPolicy policy, const ResourceGraph& graph,
                                           const DataflowPath& path) {
    if (policy.kind != AdmissionKind::annealed || policy.t0 > 0.0) return policy;
    double mean = 0.0;
    for (const ResourceEdge& e : graph.edges()) mean += e.latency;
    if (!graph.edges().empty()) mean /= static_cast<double>(graph.edge_count());
    policy.t0 = std::max(mean * static_cast<double>(path.length()), 1e-9);
    return policy;
}

enum class NeighborKind { all, random_k };

struct NeighborPolicy {
    NeighborKind kind = NeighborKind::all;
    std::uint32_t k = 2;

    static NeighborPolicy all() { return {}; }
    static NeighborPolicy random_k(std::uint32_t k = 2) { return {NeighborKind::random_k, k}; }
};

/// All -> the input unchanged. RandomK -> min(k, size) distinct entries,
/// uniform without replacement, returned in ascending order so downstream
/// iteration stays deterministic.
inline std::vector<NodeIndex> select_neighbors(const std::vector<NodeIndex>& neighbors,
                                               const NeighborPolicy& policy, Rng& rng) {
    if (policy.kind == NeighborKind::all || neighbors.size() <= policy.k) return neighbors;
    std::vector<NodeIndex> pool = neighbors;
    for (std::uint32_t i = 0; i < policy.k; ++i) {
        std::size_t j = i + uniform_index(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(policy.k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

// ---------------------------------------------------------------------------
// Slots

inline std::uint64_t hash_blocks(const std::vector<Block>& blocks) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    auto feed = [&h](std::uint64_t word) {
        for (int i = 0; i < 8; ++i) {
            h ^= (word >> (i * 8)) & 0xFF;
            h *= 0x100000001B3ull;
        }
    };
    for (const Block& b : blocks) {
        feed(b.node);
        feed(static_cast<std::uint64_t>(static_cast<std::uint32_t>(b.count)));
    }
    return h;
}

/// One (node, prefix-length) map set. Keeps a block-hash index so duplicate
/// probes stay cheap even when a keep-all slot grows large.
struct Slot {
    std::vector<PartialMap> maps;

    bool empty() const { return maps.empty(); }
    std::size_t size() const { return maps.size(); }

    bool contains_blocks(const std::vector<Block>& blocks) const {
        auto [lo, hi] = index_.equal_range(hash_blocks(blocks));
        for (auto it = lo; it != hi; ++it)
            if (maps[it->second].blocks == blocks) return true;
        return false;
    }

    void insert(PartialMap m) {
        index_.emplace(hash_blocks(m.blocks), static_cast<std::uint32_t>(maps.size()));
        maps.push_back(std::move(m));
    }

    /// Swap-and-pop erase, keeping the hash index positions consistent.
    void erase(std::size_t pos) {
        drop_index(hash_blocks(maps[pos].blocks), pos);
        std::size_t last = maps.size() - 1;
        if (pos != last) {
            drop_index(hash_blocks(maps[last].blocks), last);
            maps[pos] = std::move(maps[last]);
            index_.emplace(hash_blocks(maps[pos].blocks), static_cast<std::uint32_t>(pos));
        }
        maps.pop_back();
    }

    std::size_t min_cost_pos() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < maps.size(); ++i)
            if (cost_blocks_less(maps[i], maps[best])) best = i;
        return best;
    }

    std::size_t max_cost_pos() const {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < maps.size(); ++i)
            if (cost_blocks_less(maps[worst], maps[i])) worst = i;
        return worst;
    }

    void clear() {
        maps.clear();
        index_.clear();
    }

  private:
    void drop_index(std::uint64_t hash, std::size_t pos) {
        auto [lo, hi] = index_.equal_range(hash);
        for (auto it = lo; it != hi; ++it)
            if (it->second == pos) {
                index_.erase(it);
                return;
            }
    }

    std::unordered_multimap<std::uint64_t, std::uint32_t> index_;
};

// ---------------------------------------------------------------------------
// Admission

struct AdmitOutcome {
    bool admitted = false;
    std::uint32_t evicted = 0;
};

/// Offer a candidate to a slot under the given policy. `round` drives the
/// annealed temperature: the sweep index centrally, the hop count in the
/// distributed protocol. A candidate whose block sequence is already stored
/// is always rejected; the slot's minimum-cost map is never evicted.
inline AdmitOutcome admit(Slot& slot, PartialMap candidate, const AdmissionPolicy& policy,
                          std::int32_t round, Rng& rng) {
    switch (policy.kind) {
        case AdmissionKind::keep_all: {
            if (slot.contains_blocks(candidate.blocks)) return {false, 0};
            slot.insert(std::move(candidate));
            return {true, 0};
        }
        case AdmissionKind::least_cost: {
            if (slot.empty()) {
                slot.insert(std::move(candidate));
                return {true, 0};
            }
            // Ties keep the incumbent, which also covers exact duplicates.
            if (candidate.cost >= slot.maps[0].cost) return {false, 0};
            slot.erase(0);
            slot.insert(std::move(candidate));
            return {true, 1};
        }
        case AdmissionKind::annealed: {
            if (slot.contains_blocks(candidate.blocks)) return {false, 0};
            if (!slot.empty()) {
                double delta = candidate.cost - slot.maps[slot.min_cost_pos()].cost;
                if (delta > 0.0) {
                    double t = policy.t0 * std::pow(policy.alpha, static_cast<double>(round));
                    if (!(t > 0.0)) return {false, 0};
                    if (!(u01(rng) < std::exp(-delta / t))) return {false, 0};
                }
            }
            slot.insert(std::move(candidate));
            AdmitOutcome out{true, 0};
            if (slot.size() > policy.max_slot) {
                slot.erase(slot.max_cost_pos());
                out.evicted = 1;
            }
            return out;
        }
    }
    return {false, 0};
}

}  // namespace flowmap
