// Batch benchmarking: seeded instance sweeps across solver arms, CSV rows in
// deterministic order plus '#'-prefixed summary lines (optimality rates and
// keep-all vs heuristic reduction ratios).
#pragma once

#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "flowmap/dist.hpp"
#include "flowmap/exact.hpp"
#include "flowmap/gen.hpp"
#include "flowmap/model.hpp"
#include "flowmap/oracle.hpp"
#include "flowmap/verify.hpp"

namespace flowmap {

enum class Arm {
    exact_keepall,
    exact_leastcost,
    exact_annealed,
    dist_keepall,
    dist_leastcost,
    dist_annealed,
    oracle,
};

inline const char* arm_name(Arm a) {
    switch (a) {
        case Arm::exact_keepall: return "exact-keepall";
        case Arm::exact_leastcost: return "exact-leastcost";
        case Arm::exact_annealed: return "exact-annealed";
        case Arm::dist_keepall: return "dist-keepall";
        case Arm::dist_leastcost: return "dist-leastcost";
        case Arm::dist_annealed: return "dist-annealed";
        case Arm::oracle: return "oracle";
    }
    return "unknown";
}

inline std::optional<Arm> arm_from_name(const std::string& name) {
    for (Arm a : {Arm::exact_keepall, Arm::exact_leastcost, Arm::exact_annealed,
                  Arm::dist_keepall, Arm::dist_leastcost, Arm::dist_annealed, Arm::oracle})
        if (name == arm_name(a)) return a;
    return std::nullopt;
}

struct BenchConfig {
    std::uint64_t seed = 0;   // base; instance i uses seed + i
    std::uint32_t count = 0;  // number of instances
    std::uint32_t n_lo = 4, n_hi = 9;
    std::uint32_t p_lo = 3, p_hi = 6;
    GenParams gen;  // density/range/req_scale template; n, p, seed set per instance
    std::vector<Arm> arms{Arm::exact_keepall, Arm::exact_leastcost, Arm::oracle};
    std::size_t oracle_max_nodes = 10;  // oracle arm rows above this are skipped
    AdmissionPolicy annealed = AdmissionPolicy::annealed();  // parameters for *-annealed arms
    NeighborPolicy neighbors;                                // applied to every solver arm
    SolveMode mode = SolveMode::optimal;
    unsigned jobs = 1;
};

struct BenchRow {
    std::uint64_t seed = 0;
    std::uint32_t n = 0, p = 0;
    Arm arm = Arm::exact_keepall;
    bool skipped = false;
    bool feasible = false;
    std::optional<double> cost;
    std::optional<double> optimal_cost;
    std::optional<bool> is_optimal;
    RunStats stats;
};

namespace detail {

struct ArmOutcome {
    bool skipped = false;
    bool feasible = false;
    std::optional<double> cost;
    std::optional<PartialMap> best_map;
    RunStats stats;
};

inline ArmOutcome run_arm(Arm arm, const ResourceGraph& graph, const DataflowPath& path,
                          const BenchConfig& cfg, std::uint64_t seed) {
    ArmOutcome out;
    auto admission_for = [&](Arm a) {
        switch (a) {
            case Arm::exact_leastcost:
            case Arm::dist_leastcost: return AdmissionPolicy::least_cost();
            case Arm::exact_annealed:
            case Arm::dist_annealed: return cfg.annealed;
            default: return AdmissionPolicy::keep_all();
        }
    };
    switch (arm) {
        case Arm::oracle: {
            if (graph.node_count() > cfg.oracle_max_nodes) {
                out.skipped = true;
                return out;
            }
            auto best = brute_force_optimal(graph, path, {cfg.oracle_max_nodes});
            out.feasible = best.has_value();
            if (best) {
                out.cost = best->cost;
                out.best_map = *best;
            }
            return out;
        }
        case Arm::exact_keepall:
        case Arm::exact_leastcost:
        case Arm::exact_annealed: {
            SolverConfig scfg;
            scfg.mode = cfg.mode;
            scfg.admission = admission_for(arm);
            scfg.neighbors = cfg.neighbors;
            scfg.seed = seed;
            SolveResult res = pathmap(graph, path, scfg);
            out.feasible = res.feasible();
            if (res.best_map) {
                out.cost = res.best_map->cost;
                out.best_map = res.best_map;
            }
            out.stats = res.stats;
            return out;
        }
        case Arm::dist_keepall:
        case Arm::dist_leastcost:
        case Arm::dist_annealed: {
            SimConfig scfg;
            scfg.mode = cfg.mode;
            scfg.admission = admission_for(arm);
            scfg.neighbors = cfg.neighbors;
            scfg.seed = seed;
            SimResult res = run_simulation(graph, path, scfg);
            out.feasible = res.feasible();
            if (res.best_map) {
                out.cost = res.best_map->cost;
                out.best_map = res.best_map;
            }
            out.stats = res.stats;
            return out;
        }
    }
    return out;
}

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

/// Run every (instance, arm) combination. Rows come back grouped by instance
/// in seed order, arms in the configured order, independent of the worker
/// count. Each feasible placement is re-verified before it is reported.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    if (cfg.n_lo < 2 || cfg.n_hi < cfg.n_lo) throw std::invalid_argument("need 2 <= n_lo <= n_hi");
    if (cfg.p_lo < 2 || cfg.p_hi < cfg.p_lo) throw std::invalid_argument("need 2 <= p_lo <= p_hi");
    if (auto bad = cfg.annealed.invalid()) throw std::invalid_argument("annealed policy: " + *bad);
    std::vector<std::vector<BenchRow>> per_instance(cfg.count);
    std::atomic<std::uint32_t> cursor{0};

    auto worker = [&]() {
        for (;;) {
            const std::uint32_t i = cursor.fetch_add(1);
            if (i >= cfg.count) return;
            const std::uint64_t seed = cfg.seed + i;
            Rng shape(mix_seed(mix_seed(seed)));  // instance-shape stream
            GenParams params = cfg.gen;
            params.n = cfg.n_lo + static_cast<std::uint32_t>(uniform_index(shape, cfg.n_hi - cfg.n_lo + 1));
            params.p = cfg.p_lo + static_cast<std::uint32_t>(uniform_index(shape, cfg.p_hi - cfg.p_lo + 1));
            params.seed = seed;
            ResourceGraph graph = waxman_topology(params);
            DataflowPath path = random_dataflow_path(graph, params);

            std::vector<detail::ArmOutcome> outcomes;
            outcomes.reserve(cfg.arms.size());
            for (Arm arm : cfg.arms) outcomes.push_back(detail::run_arm(arm, graph, path, cfg, seed));

            // Optimality reference: the oracle when it ran, else exact keep-all.
            const detail::ArmOutcome* ref = nullptr;
            for (std::size_t a = 0; a < cfg.arms.size(); ++a)
                if (cfg.arms[a] == Arm::oracle && !outcomes[a].skipped) ref = &outcomes[a];
            if (!ref)
                for (std::size_t a = 0; a < cfg.arms.size(); ++a)
                    if (cfg.arms[a] == Arm::exact_keepall) ref = &outcomes[a];

            std::vector<BenchRow>& rows = per_instance[i];
            for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
                const detail::ArmOutcome& oc = outcomes[a];
                BenchRow row;
                row.seed = seed;
                row.n = params.n;
                row.p = params.p;
                row.arm = cfg.arms[a];
                row.skipped = oc.skipped;
                row.feasible = oc.feasible;
                row.cost = oc.cost;
                row.stats = oc.stats;
                if (oc.best_map) {
                    auto rep = verify_path_mapping(graph, path,
                                                   to_complete_mapping(*oc.best_map, path.length()));
                    if (!rep.feasible())
                        throw std::logic_error("bench: " + std::string(arm_name(row.arm)) +
                                               " produced an infeasible placement at seed " +
                                               std::to_string(seed));
                }
                if (ref && !oc.skipped) {
                    if (ref->feasible) row.optimal_cost = ref->cost;
                    if (oc.feasible != ref->feasible) {
                        row.is_optimal = false;
                    } else if (!oc.feasible) {
                        row.is_optimal = true;  // agreeing on infeasibility is correct
                    } else {
                        double eps = 1e-9 * std::max(1.0, std::abs(*ref->cost));
                        row.is_optimal = std::abs(*oc.cost - *ref->cost) <= eps;
                    }
                }
                rows.push_back(std::move(row));
            }
        }
    };

    const unsigned jobs = std::max(1u, cfg.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::vector<BenchRow> rows;
    for (auto& group : per_instance)
        for (BenchRow& row : group) rows.push_back(std::move(row));
    return rows;
}

/// CSV with fixed columns, then the summary block: per-arm optimality rates,
/// geometric-mean total_maps ratios of exact keep-all over each exact
/// heuristic arm, and geometric-mean message ratios of distributed keep-all
/// over each distributed heuristic arm.
inline void write_bench_csv(const std::vector<BenchRow>& rows, const BenchConfig& cfg,
                            std::ostream& os) {
    os << "seed,n,p,arm,feasible,cost,optimal_cost,is_optimal,max_slot_size,total_maps,"
          "messages_sent,extension_attempts,wall_ms\n";
    for (const BenchRow& row : rows) {
        os << row.seed << ',' << row.n << ',' << row.p << ',' << arm_name(row.arm) << ',';
        if (row.skipped)
            os << "skipped";
        else
            os << (row.feasible ? "true" : "false");
        os << ',';
        if (row.cost) os << detail::fmt_double(*row.cost);
        os << ',';
        if (row.optimal_cost) os << detail::fmt_double(*row.optimal_cost);
        os << ',';
        if (row.is_optimal) os << (*row.is_optimal ? "true" : "false");
        os << ',' << row.stats.max_slot_size << ',' << row.stats.total_map_count << ','
           << row.stats.messages_sent << ',' << row.stats.extension_attempts << ','
           << std::fixed << std::setprecision(3) << row.stats.wall_ms
           << std::defaultfloat << '\n';
    }
    if (rows.empty()) return;

    for (Arm arm : cfg.arms) {
        std::uint64_t measured = 0, optimal = 0, feasible = 0, total = 0;
        for (const BenchRow& row : rows) {
            if (row.arm != arm || row.skipped) continue;
            ++total;
            if (row.feasible) ++feasible;
            if (row.is_optimal) {
                ++measured;
                if (*row.is_optimal) ++optimal;
            }
        }
        os << "# arm=" << arm_name(arm) << " instances=" << total << " feasible=" << feasible;
        if (measured)
            os << " optimal=" << optimal << "/" << measured << " rate="
               << detail::fmt_double(static_cast<double>(optimal) / static_cast<double>(measured));
        os << '\n';
    }

    auto geomean_ratio = [&](Arm base, Arm other, auto metric, const char* label) {
        double log_sum = 0.0;
        std::uint64_t count = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].arm != base || rows[i].skipped) continue;
            for (std::size_t j = 0; j < rows.size(); ++j) {
                if (rows[j].seed != rows[i].seed || rows[j].arm != other || rows[j].skipped)
                    continue;
                double a = static_cast<double>(metric(rows[i]));
                double b = static_cast<double>(metric(rows[j]));
                if (a > 0.0 && b > 0.0) {
                    log_sum += std::log(a / b);
                    ++count;
                }
            }
        }
        if (count)
            os << "# ratio " << label << ' ' << arm_name(base) << '/' << arm_name(other)
               << " geomean=" << detail::fmt_double(std::exp(log_sum / static_cast<double>(count)))
               << " instances=" << count << '\n';
    };
    auto maps_of = [](const BenchRow& r) { return r.stats.total_map_count; };
    auto msgs_of = [](const BenchRow& r) { return r.stats.messages_sent; };
    for (Arm arm : cfg.arms)
        if (arm == Arm::exact_leastcost || arm == Arm::exact_annealed)
            geomean_ratio(Arm::exact_keepall, arm, maps_of, "total_maps");
    for (Arm arm : cfg.arms)
        if (arm == Arm::dist_leastcost || arm == Arm::dist_annealed)
            geomean_ratio(Arm::dist_keepall, arm, msgs_of, "messages_sent");
}

}  // namespace flowmap
