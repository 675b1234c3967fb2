#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>
#include <regex>

#include "flowmap/json.hpp"
#include "support/fixtures.hpp"

using json = nlohmann::json;
using testsupport::CliResult;
using testsupport::k3_infeasible_instance;
using testsupport::k3_instance;
using testsupport::read_file;
using testsupport::run_cli;
using testsupport::temp_dir;
using testsupport::write_file;

namespace {

const std::string kCli = FLOWMAP_CLI_PATH;

std::string k3_json() { return flowmap::instance_to_json(k3_instance()).dump(); }

std::string stage(const std::string& name, const std::string& text) {
    static const std::string dir = temp_dir();
    std::string path = dir + "/" + name;
    write_file(path, text);
    return path;
}

// Simulated-time outputs are deterministic; wall-clock fields are not.
std::string mask_wall(std::string text) {
    static const std::regex wall("\"wall_ms\": *[0-9.eE+-]+");
    return std::regex_replace(text, wall, "\"wall_ms\":X");
}

std::string mask_csv_wall(const std::string& csv) {
    std::string out;
    std::istringstream is(csv);
    for (std::string line; std::getline(is, line);) {
        if (!line.empty() && line[0] != '#' && line.find(',') != std::string::npos)
            line = line.substr(0, line.rfind(','));
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace

TEST_CASE("solve reports the triangle optimum and exits zero") {
    auto path = stage("k3.json", k3_json());
    auto res = run_cli(kCli, "solve --policy keepall --mode optimal " + path);
    REQUIRE(res.exit_code == 0);
    json out = json::parse(res.out);
    REQUIRE(out["feasible"] == true);
    REQUIRE(out["cost"] == 2.0);
    REQUIRE(out["mapping"]["vertex_map"].size() == 3);
    REQUIRE(out["stats"].contains("maps_admitted"));
}

TEST_CASE("solve on an infeasible instance exits one") {
    auto path = stage("k3bad.json", flowmap::instance_to_json(k3_infeasible_instance()).dump());
    auto res = run_cli(kCli, "solve " + path);
    REQUIRE(res.exit_code == 1);
    json out = json::parse(res.out);
    REQUIRE(out["feasible"] == false);
    REQUIRE_FALSE(out.contains("cost"));
}

TEST_CASE("instances can arrive on stdin") {
    auto res = run_cli(kCli, "solve -", k3_json());
    REQUIRE(res.exit_code == 0);
    REQUIRE(json::parse(res.out)["cost"] == 2.0);
}

TEST_CASE("verify round-trips a solved mapping") {
    auto inst_path = stage("k3v.json", k3_json());
    auto solved = run_cli(kCli, "solve " + inst_path);
    REQUIRE(solved.exit_code == 0);
    auto map_path = stage("k3v-map.json", json::parse(solved.out)["mapping"].dump());
    auto res = run_cli(kCli, "verify " + inst_path + " " + map_path);
    REQUIRE(res.exit_code == 0);
    json out = json::parse(res.out);
    REQUIRE(out["feasible"] == true);
    REQUIRE(out["cost"] == 2.0);
    REQUIRE(out["violations"].empty());
}

TEST_CASE("verify flags a bandwidth-starved placement and exits one") {
    auto inst_path = stage("k3w.json", k3_json());
    // Pipeline nodes 0 | 1,2 split across the narrow direct link.
    json bad = {{"vertex_map", {"A", "C", "C"}}};
    auto map_path = stage("k3w-map.json", bad.dump());
    auto edited = json::parse(read_file(inst_path));
    edited["graph"]["edges"][0]["bandwidth"] = 2.0;  // choke A-B as well
    auto inst2 = stage("k3w2.json", edited.dump());
    auto res = run_cli(kCli, "verify " + inst2 + " " + map_path);
    REQUIRE(res.exit_code == 1);
    json out = json::parse(res.out);
    REQUIRE(out["feasible"] == false);
    REQUIRE_FALSE(out["violations"].empty());
}

TEST_CASE("malformed input exits two with a diagnostic naming the field") {
    SECTION("unparseable JSON") {
        auto res = run_cli(kCli, "solve -", "{not json");
        REQUIRE(res.exit_code == 2);
        REQUIRE(res.err.find("error:") != std::string::npos);
    }
    SECTION("well-formed JSON with a broken field") {
        json broken = json::parse(k3_json());
        broken["graph"]["nodes"][1]["capacity"] = "plenty";
        auto res = run_cli(kCli, "solve -", broken.dump());
        REQUIRE(res.exit_code == 2);
        REQUIRE(res.err.find("nodes[1].capacity") != std::string::npos);
    }
    SECTION("unknown flag") {
        auto res = run_cli(kCli, "solve --frobnicate x.json");
        REQUIRE(res.exit_code == 2);
    }
    SECTION("unknown subcommand") {
        auto res = run_cli(kCli, "dance");
        REQUIRE(res.exit_code == 2);
    }
}

TEST_CASE("gen requires a seed and writes a valid instance") {
    auto none = run_cli(kCli, "gen --n 5");
    REQUIRE(none.exit_code == 2);
    REQUIRE(none.err.find("seed") != std::string::npos);

    auto res = run_cli(kCli, "gen --seed 7 --n 6 --p 3");
    REQUIRE(res.exit_code == 0);
    json out = json::parse(res.out);
    REQUIRE(out["graph"]["nodes"].size() == 6);
    REQUIRE(out["path"]["comp_reqs"].size() == 3);

    // The emitted instance feeds straight back into solve.
    auto solved = run_cli(kCli, "solve -", res.out);
    REQUIRE((solved.exit_code == 0 || solved.exit_code == 1));
}

TEST_CASE("gen emits resolved parameters on request") {
    auto res = run_cli(kCli, "gen --seed 3 --n 5 --emit-params");
    REQUIRE(res.exit_code == 0);
    json out = json::parse(res.out);
    REQUIRE(out["params"]["seed"] == 3);
    REQUIRE(out["params"]["n"] == 5);
    REQUIRE(out["params"]["waxman_alpha"] == 0.15);
    REQUIRE(out["params"]["req_scale"] == 0.5);
}

TEST_CASE("results can be redirected to a file") {
    static const std::string dir = temp_dir();
    auto inst = stage("k3o.json", k3_json());
    std::string out_path = dir + "/solve-out.json";
    auto res = run_cli(kCli, "solve --out " + out_path + " " + inst);
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.out.empty());
    REQUIRE(json::parse(read_file(out_path))["cost"] == 2.0);
}

TEST_CASE("config files fill in flags without overriding them") {
    auto inst = stage("k3c.json", k3_json());
    auto cfg = stage("cfg.json", json{{"policy", "leastcost"}, {"mode", "optimal"}}.dump());

    // Config alone: least-cost slots cap at one map each.
    auto from_cfg = run_cli(kCli, "solve --config " + cfg + " " + inst);
    REQUIRE(from_cfg.exit_code == 0);
    REQUIRE(json::parse(from_cfg.out)["stats"]["max_slot_size"] == 1);

    // Flag beats config: keep-all retains all three sink placements.
    auto flag_wins = run_cli(kCli, "solve --config " + cfg + " --policy keepall " + inst);
    REQUIRE(flag_wins.exit_code == 0);
    REQUIRE(json::parse(flag_wins.out)["stats"]["max_slot_size"] >= 3);

    // Unknown config type: named diagnostic, exit 2.
    auto bad_cfg = stage("cfg-bad.json", json{{"policy", 7}}.dump());
    auto broken = run_cli(kCli, "solve --config " + bad_cfg + " " + inst);
    REQUIRE(broken.exit_code == 2);
    REQUIRE(broken.err.find("config.policy") != std::string::npos);
}

TEST_CASE("simulate matches solve and dumps a parseable trace") {
    static const std::string dir = temp_dir();
    auto inst = stage("k3s.json", k3_json());
    std::string trace_path = dir + "/trace.jsonl";
    auto sim = run_cli(kCli, "simulate --trace " + trace_path + " " + inst);
    REQUIRE(sim.exit_code == 0);
    json out = json::parse(sim.out);
    REQUIRE(out["feasible"] == true);
    REQUIRE(out["cost"] == 2.0);
    REQUIRE(out["truncated"] == false);
    REQUIRE(out["per_node"].size() == 3);

    std::istringstream trace(read_file(trace_path));
    std::size_t count = 0;
    for (std::string line; std::getline(trace, line);) {
        json msg = json::parse(line);
        REQUIRE(msg.contains("seq"));
        REQUIRE(msg.contains("from"));
        REQUIRE(msg.contains("to"));
        REQUIRE(msg.contains("deliver_time"));
        REQUIRE(msg.contains("carries_spec"));
        REQUIRE(msg["map"].contains("blocks"));
        ++count;
    }
    REQUIRE(count == out["stats"]["messages_sent"]);
}

TEST_CASE("oracle lists every feasible placement") {
    auto inst = stage("k3r.json", k3_json());
    auto res = run_cli(kCli, "oracle " + inst);
    REQUIRE(res.exit_code == 0);
    json out = json::parse(res.out);
    REQUIRE(out["count"] == 3);
    REQUIRE(out["mappings"].size() == 3);

    // The refusal path: an 11-node instance needs --force or a higher cap.
    auto big = run_cli(kCli, "gen --seed 11 --n 11 --p 3");
    REQUIRE(big.exit_code == 0);
    auto refused = run_cli(kCli, "oracle -", big.out);
    REQUIRE(refused.exit_code == 2);
    REQUIRE(refused.err.find("limit") != std::string::npos);
    auto forced = run_cli(kCli, "oracle --max-nodes 11 -", big.out);
    REQUIRE(forced.exit_code == 0);
}

TEST_CASE("bench writes the fixed CSV schema") {
    auto none = run_cli(kCli, "bench");
    REQUIRE(none.exit_code == 2);

    auto res = run_cli(kCli,
                       "bench --seed po --count 2"
                       " --arms exact-keepall,oracle --n-lo 4 --n-hi 5");
    REQUIRE(res.exit_code == 2);  // non-numeric seed

    auto ok = run_cli(kCli,
                      "bench --seed 120 --count 2"
                      " --arms exact-keepall,oracle --n-lo 4 --n-hi 5 --p-lo 3 --p-hi 3");
    REQUIRE(ok.exit_code == 0);
    std::istringstream is(ok.out);
    std::string header;
    std::getline(is, header);
    REQUIRE(header ==
            "seed,n,p,arm,feasible,cost,optimal_cost,is_optimal,max_slot_size,total_maps,"
            "messages_sent,extension_attempts,wall_ms");
    REQUIRE(ok.out.find("# arm=exact-keepall") != std::string::npos);

    auto unknown = run_cli(kCli, "bench --seed 1 --count 1 --arms exact-keepall,warp");
    REQUIRE(unknown.exit_code == 2);
    REQUIRE(unknown.err.find("warp") != std::string::npos);
}

TEST_CASE("identical invocations produce identical bytes") {
    auto inst = stage("k3d.json", k3_json());

    auto gen_a = run_cli(kCli, "gen --seed 42 --n 8 --p 4");
    auto gen_b = run_cli(kCli, "gen --seed 42 --n 8 --p 4");
    REQUIRE(gen_a.out == gen_b.out);

    auto solve_a = run_cli(kCli, "solve --policy annealed --seed 5 " + inst);
    auto solve_b = run_cli(kCli, "solve --policy annealed --seed 5 " + inst);
    REQUIRE(mask_wall(solve_a.out) == mask_wall(solve_b.out));

    auto sim_a = run_cli(kCli, "simulate --neighbors randomk --k 2 --seed 9 " + inst);
    auto sim_b = run_cli(kCli, "simulate --neighbors randomk --k 2 --seed 9 " + inst);
    REQUIRE(mask_wall(sim_a.out) == mask_wall(sim_b.out));

    std::string bench_args =
        "bench --seed 77 --count 2 --arms exact-keepall,dist-keepall --n-lo 4 --n-hi 5";
    auto bench_a = run_cli(kCli, bench_args);
    auto bench_b = run_cli(kCli, bench_args);
    REQUIRE(mask_csv_wall(bench_a.out) == mask_csv_wall(bench_b.out));
}
