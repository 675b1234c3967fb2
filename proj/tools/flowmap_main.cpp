// flowmap: command-line front end for the pipeline placement library.
//
// Subcommands: gen, solve, simulate, oracle, verify, bench.
// Exit codes: 0 success (and feasible, where that applies), 1 infeasible,
// 2 usage or input-format error. Diagnostics go to stderr; results to stdout
// or --out.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flowmap/flowmap.hpp"

namespace {

using flowmap::json;

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("FLOWMAP_LOG");
        return env != nullptr ? std::atoi(env) : 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "flowmap: " << msg << "\n";
}

json read_json_input(const std::string& path) {
    const bool use_stdin = path.empty() || path == "-";
    try {
        if (use_stdin) return json::parse(std::cin);
        std::ifstream in(path);
        if (!in) throw flowmap::FormatError(path + ": cannot open for reading");
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw flowmap::FormatError((use_stdin ? std::string("<stdin>") : path) + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw flowmap::FormatError(path + ": cannot open for writing");
    out << text;
    if (!out) throw flowmap::FormatError(path + ": write failed");
}

flowmap::Instance load_instance(const std::string& path) {
    flowmap::Instance inst = flowmap::instance_from_json(read_json_input(path));
    auto report = flowmap::validate_instance(inst.graph, inst.path);
    if (!report.feasible()) {
        const auto& v = report.violations.front();
        throw flowmap::FormatError(std::string("instance rejected: ") + flowmap::to_string(v.kind) +
                                   ": " + v.location);
    }
    return inst;
}

// Shared solver/simulator knobs. Every subcommand that runs a solver exposes
// the same flags; option pointers are kept so a config file can fill in only
// the flags the command line left untouched.
struct PolicyFlags {
    std::string policy = "keepall";
    double t0 = 0.0;
    double alpha = 0.9;
    std::uint32_t max_slot = 4;
    std::string neighbors = "all";
    std::uint32_t k = 2;
    std::uint64_t seed = 0;
    std::string mode = "optimal";

    CLI::Option* policy_opt = nullptr;
    CLI::Option* t0_opt = nullptr;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* max_slot_opt = nullptr;
    CLI::Option* neighbors_opt = nullptr;
    CLI::Option* k_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
};

void add_policy_flags(CLI::App* cmd, PolicyFlags& f) {
    f.policy_opt = cmd->add_option("--policy", f.policy, "admission policy")
                       ->check(CLI::IsMember({"keepall", "leastcost", "annealed"}));
    f.t0_opt = cmd->add_option("--t0", f.t0, "annealed start temperature (<=0 picks one from the instance)");
    f.alpha_opt = cmd->add_option("--alpha", f.alpha, "annealed cooling factor in (0,1)");
    f.max_slot_opt = cmd->add_option("--max-slot", f.max_slot, "annealed per-slot map bound");
    f.neighbors_opt = cmd->add_option("--neighbors", f.neighbors, "neighbor selection")
                          ->check(CLI::IsMember({"all", "randomk"}));
    f.k_opt = cmd->add_option("--k", f.k, "sample size for randomk neighbors");
    f.seed_opt = cmd->add_option("--seed", f.seed, "RNG seed");
    f.mode_opt = cmd->add_option("--mode", f.mode, "stop at the first complete mapping or keep going")
                     ->check(CLI::IsMember({"optimal", "first_feasible"}));
}

flowmap::AdmissionPolicy admission_from(const PolicyFlags& f) {
    if (f.policy == "leastcost") return flowmap::AdmissionPolicy::least_cost();
    if (f.policy == "annealed") return flowmap::AdmissionPolicy::annealed(f.t0, f.alpha, f.max_slot);
    return flowmap::AdmissionPolicy::keep_all();
}

flowmap::NeighborPolicy neighbors_from(const PolicyFlags& f) {
    if (f.neighbors == "randomk") return flowmap::NeighborPolicy::random_k(f.k);
    return flowmap::NeighborPolicy::all();
}

flowmap::SolveMode mode_from(const PolicyFlags& f) {
    return f.mode == "first_feasible" ? flowmap::SolveMode::first_feasible
                                      : flowmap::SolveMode::optimal;
}

// Config-file merge: a value from the file applies only when the matching
// flag was not given on the command line. Flags win, then the file, then
// built-in defaults.
class ConfigMerge {
  public:
    explicit ConfigMerge(json doc) : doc_(std::move(doc)) {
        if (!doc_.is_object()) throw flowmap::FormatError("config: expected a JSON object");
    }

    template <typename T>
    void apply(const char* key, CLI::Option* opt, T& target) {
        if (opt != nullptr && opt->count() > 0) return;
        if (!doc_.contains(key)) return;
        try {
            target = doc_.at(key).get<T>();
        } catch (const json::exception&) {
            throw flowmap::FormatError(std::string("config.") + key + ": wrong type");
        }
        seen_.push_back(key);
    }

    bool provided(const char* key) const { return doc_.contains(key); }

  private:
    json doc_;
    std::vector<std::string> seen_;
};

std::optional<ConfigMerge> load_config(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return ConfigMerge(read_json_input(path));
}

void apply_policy_config(ConfigMerge& cfg, PolicyFlags& f) {
    cfg.apply("policy", f.policy_opt, f.policy);
    cfg.apply("t0", f.t0_opt, f.t0);
    cfg.apply("alpha", f.alpha_opt, f.alpha);
    cfg.apply("max_slot", f.max_slot_opt, f.max_slot);
    cfg.apply("neighbors", f.neighbors_opt, f.neighbors);
    cfg.apply("k", f.k_opt, f.k);
    cfg.apply("seed", f.seed_opt, f.seed);
    cfg.apply("mode", f.mode_opt, f.mode);
    if (f.policy != "keepall" && f.policy != "leastcost" && f.policy != "annealed")
        throw flowmap::FormatError("config.policy: unknown policy '" + f.policy + "'");
    if (f.neighbors != "all" && f.neighbors != "randomk")
        throw flowmap::FormatError("config.neighbors: unknown selection '" + f.neighbors + "'");
    if (f.mode != "optimal" && f.mode != "first_feasible")
        throw flowmap::FormatError("config.mode: unknown mode '" + f.mode + "'");
}

json per_node_to_json(const flowmap::ResourceGraph& graph,
                      const std::vector<flowmap::PerNodeStats>& per_node) {
    json arr = json::array();
    for (const auto& s : per_node) {
        arr.push_back({{"node", graph.id_of(s.node)},
                       {"messages_received", s.messages_received},
                       {"messages_emitted", s.messages_emitted},
                       {"maps_stored", s.maps_stored},
                       {"seen_spec", s.seen_spec}});
    }
    return arr;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    flowmap::GenParams params;
    std::string out;
    std::string config;
    bool emit_params = false;

    CLI::Option* n_opt = nullptr;
    CLI::Option* p_opt = nullptr;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* cap_lo_opt = nullptr;
    CLI::Option* cap_hi_opt = nullptr;
    CLI::Option* bw_lo_opt = nullptr;
    CLI::Option* bw_hi_opt = nullptr;
    CLI::Option* lat_lo_opt = nullptr;
    CLI::Option* lat_hi_opt = nullptr;
    CLI::Option* req_scale_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_gen_param_flags(CLI::App* cmd, GenArgs& a) {
    a.n_opt = cmd->add_option("--n", a.params.n, "resource node count");
    a.p_opt = cmd->add_option("--p", a.params.p, "pipeline length");
    a.alpha_opt = cmd->add_option("--waxman-alpha", a.params.waxman_alpha, "distance decay scale");
    a.beta_opt = cmd->add_option("--waxman-beta", a.params.waxman_beta, "edge density in (0,1]");
    a.cap_lo_opt = cmd->add_option("--cap-lo", a.params.capacity_range.lo, "node capacity lower bound");
    a.cap_hi_opt = cmd->add_option("--cap-hi", a.params.capacity_range.hi, "node capacity upper bound");
    a.bw_lo_opt = cmd->add_option("--bw-lo", a.params.bandwidth_range.lo, "link bandwidth lower bound");
    a.bw_hi_opt = cmd->add_option("--bw-hi", a.params.bandwidth_range.hi, "link bandwidth upper bound");
    a.lat_lo_opt = cmd->add_option("--lat-lo", a.params.latency_range.lo, "link latency lower bound");
    a.lat_hi_opt = cmd->add_option("--lat-hi", a.params.latency_range.hi, "link latency upper bound");
    a.req_scale_opt = cmd->add_option("--req-scale", a.params.req_scale,
                                      "requirement scale as a fraction of median supply");
    a.seed_opt = cmd->add_option("--seed", a.params.seed, "RNG seed");
}

void apply_gen_config(ConfigMerge& cfg, GenArgs& a) {
    cfg.apply("n", a.n_opt, a.params.n);
    cfg.apply("p", a.p_opt, a.params.p);
    cfg.apply("waxman_alpha", a.alpha_opt, a.params.waxman_alpha);
    cfg.apply("waxman_beta", a.beta_opt, a.params.waxman_beta);
    cfg.apply("cap_lo", a.cap_lo_opt, a.params.capacity_range.lo);
    cfg.apply("cap_hi", a.cap_hi_opt, a.params.capacity_range.hi);
    cfg.apply("bw_lo", a.bw_lo_opt, a.params.bandwidth_range.lo);
    cfg.apply("bw_hi", a.bw_hi_opt, a.params.bandwidth_range.hi);
    cfg.apply("lat_lo", a.lat_lo_opt, a.params.latency_range.lo);
    cfg.apply("lat_hi", a.lat_hi_opt, a.params.latency_range.hi);
    cfg.apply("req_scale", a.req_scale_opt, a.params.req_scale);
    cfg.apply("seed", a.seed_opt, a.params.seed);
}

json gen_params_to_json(const flowmap::GenParams& g) {
    return {{"n", g.n},
            {"p", g.p},
            {"waxman_alpha", g.waxman_alpha},
            {"waxman_beta", g.waxman_beta},
            {"cap_lo", g.capacity_range.lo},
            {"cap_hi", g.capacity_range.hi},
            {"bw_lo", g.bandwidth_range.lo},
            {"bw_hi", g.bandwidth_range.hi},
            {"lat_lo", g.latency_range.lo},
            {"lat_hi", g.latency_range.hi},
            {"req_scale", g.req_scale},
            {"seed", g.seed}};
}

int cmd_gen(GenArgs& a) {
    auto cfg = load_config(a.config);
    if (cfg) apply_gen_config(*cfg, a);
    const bool have_seed = (a.seed_opt != nullptr && a.seed_opt->count() > 0) ||
                           (cfg && cfg->provided("seed"));
    if (!have_seed) throw flowmap::FormatError("gen: --seed is required");
    if (auto err = flowmap::validate_params(a.params))
        throw flowmap::FormatError("gen: " + *err);

    log_info("generating instance with n=" + std::to_string(a.params.n) +
             " p=" + std::to_string(a.params.p) + " seed=" + std::to_string(a.params.seed));
    flowmap::ResourceGraph graph = flowmap::waxman_topology(a.params);
    flowmap::DataflowPath path = flowmap::random_dataflow_path(graph, a.params);

    json doc = flowmap::instance_to_json({std::move(graph), std::move(path)});
    if (a.emit_params) doc["params"] = gen_params_to_json(a.params);
    write_text(a.out, doc.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
    std::string input;
    std::string out;
    std::string config;
    PolicyFlags flags;
    bool retain_old = true;
    std::uint32_t max_iterations = 0;
    CLI::Option* retain_opt = nullptr;
    CLI::Option* max_iter_opt = nullptr;
};

int cmd_solve(SolveArgs& a) {
    auto cfg = load_config(a.config);
    if (cfg) {
        apply_policy_config(*cfg, a.flags);
        cfg->apply("retain_old", a.retain_opt, a.retain_old);
        cfg->apply("max_iterations", a.max_iter_opt, a.max_iterations);
    }
    flowmap::Instance inst = load_instance(a.input);

    flowmap::SolverConfig sc;
    sc.mode = mode_from(a.flags);
    sc.admission = admission_from(a.flags);
    sc.neighbors = neighbors_from(a.flags);
    sc.seed = a.flags.seed;
    sc.retain_old = a.retain_old;
    const bool have_max_iter = (a.max_iter_opt != nullptr && a.max_iter_opt->count() > 0) ||
                               (cfg && cfg->provided("max_iterations"));
    if (have_max_iter) sc.max_iterations = a.max_iterations;

    flowmap::SolveResult res = flowmap::pathmap(inst.graph, inst.path, sc);
    log_info("solve finished: " + std::to_string(res.stats.maps_admitted) + " maps admitted");

    json doc = {{"feasible", res.feasible()}, {"stats", flowmap::stats_to_json(res.stats)}};
    if (res.best) {
        doc["cost"] = res.best->cost;
        doc["mapping"] = flowmap::mapping_to_json(inst.graph, *res.best);
    }
    write_text(a.out, doc.dump(2) + "\n");
    return res.feasible() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string input;
    std::string out;
    std::string config;
    std::string trace;
    PolicyFlags flags;
    double max_time = 0.0;
    CLI::Option* max_time_opt = nullptr;
};

int cmd_simulate(SimulateArgs& a) {
    auto cfg = load_config(a.config);
    if (cfg) {
        apply_policy_config(*cfg, a.flags);
        cfg->apply("max_simulated_time", a.max_time_opt, a.max_time);
    }
    flowmap::Instance inst = load_instance(a.input);

    flowmap::SimConfig sc;
    sc.mode = mode_from(a.flags);
    sc.admission = admission_from(a.flags);
    sc.neighbors = neighbors_from(a.flags);
    sc.seed = a.flags.seed;
    sc.max_simulated_time = a.max_time;

    std::ofstream trace_out;
    flowmap::TraceFn trace;
    if (!a.trace.empty()) {
        trace_out.open(a.trace);
        if (!trace_out) throw flowmap::FormatError(a.trace + ": cannot open for writing");
        trace = [&](const flowmap::MapMessage& m) {
            json line = {{"seq", m.seq},
                         {"from", inst.graph.id_of(m.from)},
                         {"to", inst.graph.id_of(m.to)},
                         {"send_time", m.send_time},
                         {"deliver_time", m.deliver_time},
                         {"carries_spec", m.carries_spec},
                         {"map", flowmap::partial_map_to_json(inst.graph, m.map)}};
            trace_out << line.dump() << "\n";
        };
    }

    flowmap::SimResult res = flowmap::run_simulation(inst.graph, inst.path, sc, trace);
    log_info("simulation finished: " + std::to_string(res.stats.messages_sent) + " messages");

    json doc = {{"feasible", res.feasible()},
                {"truncated", res.truncated},
                {"stats", flowmap::stats_to_json(res.stats)},
                {"per_node", per_node_to_json(inst.graph, res.per_node)}};
    if (res.best) {
        doc["cost"] = res.best->cost;
        doc["mapping"] = flowmap::mapping_to_json(inst.graph, *res.best);
    }
    write_text(a.out, doc.dump(2) + "\n");
    return res.feasible() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
    std::string input;
    std::string out;
    std::size_t max_nodes = 10;
    bool force = false;
};

int cmd_oracle(OracleArgs& a) {
    flowmap::Instance inst = load_instance(a.input);
    flowmap::OracleLimits limits;
    limits.max_nodes = a.max_nodes;
    limits.force = a.force;

    std::vector<flowmap::PartialMap> maps =
        flowmap::enumerate_feasible(inst.graph, inst.path, limits);
    const auto p = static_cast<std::uint32_t>(inst.path.length());

    json arr = json::array();
    for (const auto& m : maps)
        arr.push_back(flowmap::mapping_to_json(inst.graph, flowmap::to_complete_mapping(m, p)));
    json doc = {{"count", maps.size()}, {"mappings", std::move(arr)}};
    write_text(a.out, doc.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::string instance_path;
    std::string mapping_path;
    std::string out;
};

int cmd_verify(VerifyArgs& a) {
    flowmap::Instance inst = load_instance(a.instance_path);
    json mapping_doc = read_json_input(a.mapping_path);

    flowmap::FeasibilityReport report;
    bool has_edge_map = false;
    std::optional<flowmap::CompleteMapping> mapping =
        flowmap::mapping_from_json(inst.graph, mapping_doc, has_edge_map, report);
    if (mapping) report = flowmap::verify_path_mapping(inst.graph, inst.path, *mapping);

    json doc = flowmap::report_to_json(report);
    if (report.feasible() && mapping) {
        if (has_edge_map) {
            doc["cost"] = flowmap::mapping_cost(inst.graph, *mapping);
        } else {
            auto full = flowmap::synthesize_edge_paths(inst.graph, inst.path, *mapping);
            doc["cost"] = full ? full->cost : 0.0;
        }
    }
    write_text(a.out, doc.dump(2) + "\n");
    return report.feasible() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::string out;
    std::string config;
    GenArgs gen;  // template flags; n/p/seed ignored in favor of bench ranges
    std::uint64_t seed = 0;
    std::uint32_t count = 10;
    std::uint32_t n_lo = 4, n_hi = 9;
    std::uint32_t p_lo = 3, p_hi = 6;
    std::string arms = "exact-keepall,exact-leastcost,oracle";
    std::size_t oracle_max_nodes = 10;
    unsigned jobs = 1;
    PolicyFlags flags;  // annealed knobs + neighbors + mode for solver arms

    CLI::Option* seed_opt = nullptr;
    CLI::Option* count_opt = nullptr;
    CLI::Option* n_lo_opt = nullptr;
    CLI::Option* n_hi_opt = nullptr;
    CLI::Option* p_lo_opt = nullptr;
    CLI::Option* p_hi_opt = nullptr;
    CLI::Option* arms_opt = nullptr;
    CLI::Option* oracle_max_opt = nullptr;
    CLI::Option* jobs_opt = nullptr;
};

std::vector<flowmap::Arm> parse_arms(const std::string& text) {
    std::vector<flowmap::Arm> arms;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto arm = flowmap::arm_from_name(item);
        if (!arm) throw flowmap::FormatError("bench: unknown arm '" + item + "'");
        arms.push_back(*arm);
    }
    if (arms.empty()) throw flowmap::FormatError("bench: --arms selected nothing");
    return arms;
}

int cmd_bench(BenchArgs& a) {
    auto cfg = load_config(a.config);
    if (cfg) {
        cfg->apply("seed", a.seed_opt, a.seed);
        cfg->apply("count", a.count_opt, a.count);
        cfg->apply("n_lo", a.n_lo_opt, a.n_lo);
        cfg->apply("n_hi", a.n_hi_opt, a.n_hi);
        cfg->apply("p_lo", a.p_lo_opt, a.p_lo);
        cfg->apply("p_hi", a.p_hi_opt, a.p_hi);
        cfg->apply("arms", a.arms_opt, a.arms);
        cfg->apply("oracle_max_nodes", a.oracle_max_opt, a.oracle_max_nodes);
        cfg->apply("jobs", a.jobs_opt, a.jobs);
        apply_gen_config(*cfg, a.gen);
        apply_policy_config(*cfg, a.flags);
    }
    const bool have_seed = (a.seed_opt != nullptr && a.seed_opt->count() > 0) ||
                           (cfg && cfg->provided("seed"));
    if (!have_seed) throw flowmap::FormatError("bench: --seed is required");

    flowmap::BenchConfig bc;
    bc.seed = a.seed;
    bc.count = a.count;
    bc.n_lo = a.n_lo;
    bc.n_hi = a.n_hi;
    bc.p_lo = a.p_lo;
    bc.p_hi = a.p_hi;
    bc.gen = a.gen.params;
    bc.arms = parse_arms(a.arms);
    bc.oracle_max_nodes = a.oracle_max_nodes;
    bc.annealed = flowmap::AdmissionPolicy::annealed(a.flags.t0, a.flags.alpha, a.flags.max_slot);
    bc.neighbors = neighbors_from(a.flags);
    bc.mode = mode_from(a.flags);
    bc.jobs = a.jobs;

    log_info("benchmark: " + std::to_string(bc.count) + " instances, " +
             std::to_string(bc.arms.size()) + " arms");
    std::vector<flowmap::BenchRow> rows = flowmap::run_bench(bc);

    std::ostringstream os;
    flowmap::write_bench_csv(rows, bc, os);
    write_text(a.out, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pipeline placement over capacitated networks"};
    app.require_subcommand(1);

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a random instance");
    add_gen_param_flags(gen, gen_args);
    gen->add_flag("--emit-params", gen_args.emit_params, "include generator parameters in the output");
    gen->add_option("--out", gen_args.out, "output file (default stdout)");
    gen->add_option("--config", gen_args.config, "JSON config file; flags take precedence");

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "solve an instance");
    solve->add_option("instance", solve_args.input, "instance file ('-' or absent reads stdin)");
    add_policy_flags(solve, solve_args.flags);
    solve_args.retain_opt = solve->add_flag("--retain-old,!--no-retain-old", solve_args.retain_old,
                                            "keep maps from earlier rounds (default on)");
    solve_args.max_iter_opt =
        solve->add_option("--max-iterations", solve_args.max_iterations, "cap on relaxation rounds");
    solve->add_option("--out", solve_args.out, "output file (default stdout)");
    solve->add_option("--config", solve_args.config, "JSON config file; flags take precedence");

    SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "solve an instance via message passing");
    simulate->add_option("instance", sim_args.input, "instance file ('-' or absent reads stdin)");
    add_policy_flags(simulate, sim_args.flags);
    sim_args.max_time_opt = simulate->add_option("--max-time", sim_args.max_time,
                                                 "simulated-time cap (<=0 picks one from the instance)");
    simulate->add_option("--trace", sim_args.trace, "write one JSON line per message to this file");
    simulate->add_option("--out", sim_args.out, "output file (default stdout)");
    simulate->add_option("--config", sim_args.config, "JSON config file; flags take precedence");

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand("oracle", "enumerate every feasible mapping");
    oracle->add_option("instance", oracle_args.input, "instance file ('-' or absent reads stdin)");
    oracle->add_option("--max-nodes", oracle_args.max_nodes, "refuse graphs larger than this");
    oracle->add_flag("--force", oracle_args.force, "enumerate anyway");
    oracle->add_option("--out", oracle_args.out, "output file (default stdout)");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "check a mapping against an instance");
    verify->add_option("instance", verify_args.instance_path, "instance file")->required();
    verify->add_option("mapping", verify_args.mapping_path, "mapping file ('-' reads stdin)")->required();
    verify->add_option("--out", verify_args.out, "output file (default stdout)");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "compare solver arms over random instances");
    bench_args.seed_opt = bench->add_option("--seed", bench_args.seed, "base seed; instance i uses seed+i");
    bench_args.count_opt = bench->add_option("--count", bench_args.count, "instance count");
    bench_args.n_lo_opt = bench->add_option("--n-lo", bench_args.n_lo, "smallest node count");
    bench_args.n_hi_opt = bench->add_option("--n-hi", bench_args.n_hi, "largest node count");
    bench_args.p_lo_opt = bench->add_option("--p-lo", bench_args.p_lo, "shortest pipeline");
    bench_args.p_hi_opt = bench->add_option("--p-hi", bench_args.p_hi, "longest pipeline");
    bench_args.arms_opt = bench->add_option(
        "--arms", bench_args.arms,
        "comma-separated arms: exact-keepall, exact-leastcost, exact-annealed, "
        "dist-keepall, dist-leastcost, dist-annealed, oracle");
    bench_args.oracle_max_opt = bench->add_option("--oracle-max-nodes", bench_args.oracle_max_nodes,
                                                  "skip the oracle arm above this node count");
    bench_args.jobs_opt = bench->add_option("--jobs", bench_args.jobs, "worker threads");
    // Density/range template for generated instances; n, p, seed come from the
    // bench ranges, so those flags are not exposed here.
    bench_args.gen.alpha_opt =
        bench->add_option("--waxman-alpha", bench_args.gen.params.waxman_alpha, "distance decay scale");
    bench_args.gen.beta_opt =
        bench->add_option("--waxman-beta", bench_args.gen.params.waxman_beta, "edge density in (0,1]");
    bench_args.gen.cap_lo_opt = bench->add_option("--cap-lo", bench_args.gen.params.capacity_range.lo,
                                                  "node capacity lower bound");
    bench_args.gen.cap_hi_opt = bench->add_option("--cap-hi", bench_args.gen.params.capacity_range.hi,
                                                  "node capacity upper bound");
    bench_args.gen.bw_lo_opt = bench->add_option("--bw-lo", bench_args.gen.params.bandwidth_range.lo,
                                                 "link bandwidth lower bound");
    bench_args.gen.bw_hi_opt = bench->add_option("--bw-hi", bench_args.gen.params.bandwidth_range.hi,
                                                 "link bandwidth upper bound");
    bench_args.gen.lat_lo_opt = bench->add_option("--lat-lo", bench_args.gen.params.latency_range.lo,
                                                  "link latency lower bound");
    bench_args.gen.lat_hi_opt = bench->add_option("--lat-hi", bench_args.gen.params.latency_range.hi,
                                                  "link latency upper bound");
    bench_args.gen.req_scale_opt = bench->add_option("--req-scale", bench_args.gen.params.req_scale,
                                                     "requirement scale vs median supply");
    // Arms fix the admission policy and the instance seed drives each solver,
    // so only the remaining solver knobs are exposed.
    bench_args.flags.t0_opt = bench->add_option("--t0", bench_args.flags.t0,
                                                "annealed start temperature (<=0 picks one per instance)");
    bench_args.flags.alpha_opt =
        bench->add_option("--alpha", bench_args.flags.alpha, "annealed cooling factor in (0,1)");
    bench_args.flags.max_slot_opt =
        bench->add_option("--max-slot", bench_args.flags.max_slot, "annealed per-slot map bound");
    bench_args.flags.neighbors_opt =
        bench->add_option("--neighbors", bench_args.flags.neighbors, "neighbor selection")
            ->check(CLI::IsMember({"all", "randomk"}));
    bench_args.flags.k_opt =
        bench->add_option("--k", bench_args.flags.k, "sample size for randomk neighbors");
    bench_args.flags.mode_opt =
        bench->add_option("--mode", bench_args.flags.mode, "solver stop mode")
            ->check(CLI::IsMember({"optimal", "first_feasible"}));
    bench->add_option("--out", bench_args.out, "output file (default stdout)");
    bench->add_option("--config", bench_args.config, "JSON config file; flags take precedence");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(gen)) return cmd_gen(gen_args);
        if (app.got_subcommand(solve)) return cmd_solve(solve_args);
        if (app.got_subcommand(simulate)) return cmd_simulate(sim_args);
        if (app.got_subcommand(oracle)) return cmd_oracle(oracle_args);
        if (app.got_subcommand(verify)) return cmd_verify(verify_args);
        if (app.got_subcommand(bench)) return cmd_bench(bench_args);
    } catch (const flowmap::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand\n";
    return 2;
}
