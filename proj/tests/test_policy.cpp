#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "flowmap/policy.hpp"
#include "support/fixtures.hpp"

using namespace flowmap;

namespace {

PartialMap map_with(std::vector<Block> blocks, double cost) {
    PartialMap m;
    m.blocks = std::move(blocks);
    m.prefix_len = 0;
    for (const Block& b : m.blocks) m.prefix_len += static_cast<std::int32_t>(b.count);
    m.cost = cost;
    return m;
}

}  // namespace

TEST_CASE("keep_all admits everything except exact duplicates") {
    Slot slot;
    Rng rng(1);
    auto policy = AdmissionPolicy::keep_all();
    REQUIRE(admit(slot, map_with({{0, 1}}, 1.0), policy, 0, rng).admitted);
    REQUIRE(admit(slot, map_with({{0, 2}}, 2.0), policy, 0, rng).admitted);
    REQUIRE(admit(slot, map_with({{0, 1}, {1, 1}}, 3.0), policy, 0, rng).admitted);
    auto dup = admit(slot, map_with({{0, 2}}, 2.0), policy, 0, rng);
    REQUIRE_FALSE(dup.admitted);
    REQUIRE(slot.size() == 3);
}

TEST_CASE("keep_all final contents are arrival-order independent") {
    std::vector<PartialMap> maps = {
        map_with({{0, 1}}, 1.0),
        map_with({{0, 2}}, 2.0),
        map_with({{0, 1}, {1, 0}}, 1.5),
        map_with({{0, 1}}, 1.0),  // duplicate
    };
    auto run_order = [&](std::vector<std::size_t> order) {
        Slot slot;
        Rng rng(9);
        auto policy = AdmissionPolicy::keep_all();
        for (std::size_t i : order) admit(slot, maps[i], policy, 0, rng);
        std::vector<std::vector<Block>> got;
        for (const auto& m : slot.maps) got.push_back(m.blocks);
        std::sort(got.begin(), got.end(), [](const auto& a, const auto& b) {
            return blocks_less(a, b);
        });
        return got;
    };
    auto a = run_order({0, 1, 2, 3});
    auto b = run_order({3, 2, 1, 0});
    auto c = run_order({2, 0, 3, 1});
    REQUIRE(a == b);
    REQUIRE(a == c);
    REQUIRE(a.size() == 3);
}

TEST_CASE("least_cost keeps a single incumbent") {
    Slot slot;
    Rng rng(1);
    auto policy = AdmissionPolicy::least_cost();

    SECTION("cheaper candidate evicts") {
        REQUIRE(admit(slot, map_with({{0, 1}}, 5.0), policy, 0, rng).admitted);
        auto out = admit(slot, map_with({{0, 2}}, 3.0), policy, 0, rng);
        REQUIRE(out.admitted);
        REQUIRE(out.evicted == 1);
        REQUIRE(slot.size() == 1);
        REQUIRE(slot.maps[0].cost == 3.0);
    }
    SECTION("ties keep the incumbent") {
        admit(slot, map_with({{0, 1}}, 3.0), policy, 0, rng);
        auto out = admit(slot, map_with({{0, 2}}, 3.0), policy, 0, rng);
        REQUIRE_FALSE(out.admitted);
        REQUIRE(slot.maps[0].blocks == std::vector<Block>{{0, 1}});
    }
    SECTION("slot never exceeds one map") {
        Rng costs(42);
        for (int i = 0; i < 200; ++i) {
            admit(slot, map_with({{0, static_cast<std::int32_t>(i % 7)}}, u01(costs) * 10), policy,
                  0, rng);
            REQUIRE(slot.size() <= 1);
        }
    }
}

TEST_CASE("annealed admits improvements without randomness") {
    Slot slot;
    Rng rng(1);
    auto policy = AdmissionPolicy::annealed(1.0, 0.9, 4);
    admit(slot, map_with({{0, 1}}, 10.0), policy, 0, rng);
    // Better than the minimum: admitted regardless of temperature or rng state.
    auto out = admit(slot, map_with({{0, 2}}, 1.0), policy, 1000000, rng);
    REQUIRE(out.admitted);
}

TEST_CASE("annealed at vanishing temperature degenerates to least_cost") {
    auto policy = AdmissionPolicy::annealed(1e-9, 0.9, 4);
    Rng rng(7);
    int admitted_worse = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Slot slot;
        admit(slot, map_with({{0, 1}}, 1.0), policy, 0, rng);
        // Delta = 1 against T = 1e-9: acceptance probability is exp(-1e9) = 0.
        auto out = admit(slot, map_with({{0, 2}}, 2.0), policy, 0, rng);
        admitted_worse += out.admitted ? 1 : 0;
    }
    REQUIRE(admitted_worse == 0);
}

TEST_CASE("annealed at high temperature admits nearly everything") {
    auto policy = AdmissionPolicy::annealed(1e12, 0.9, 100);
    Rng rng(7);
    int admitted = 0;
    Slot slot;
    admit(slot, map_with({{0, 1}}, 1.0), policy, 0, rng);
    for (std::int32_t trial = 0; trial < 1000; ++trial) {
        auto out = admit(slot, map_with({{0, 1}, {1, static_cast<std::int32_t>(trial)}}, 2.0),
                         policy, 0, rng);
        admitted += out.admitted ? 1 : 0;
    }
    REQUIRE(admitted >= 995);
}

TEST_CASE("annealed cooling lowers the acceptance rate over rounds") {
    auto policy = AdmissionPolicy::annealed(1.0, 0.5, 1000000);
    auto acceptance_at_round = [&](std::int32_t round) {
        Rng rng(11);
        Slot slot;
        admit(slot, map_with({{0, 1}}, 1.0), policy, round, rng);
        int admitted = 0;
        for (std::int32_t i = 0; i < 2000; ++i) {
            auto out = admit(slot, map_with({{0, 1}, {1, i}}, 2.0), policy, round, rng);
            admitted += out.admitted ? 1 : 0;
        }
        return admitted;
    };
    int early = acceptance_at_round(0);   // T = 1, P = exp(-1) = 0.37
    int late = acceptance_at_round(8);    // T = 1/256, P = exp(-256) = 0
    REQUIRE(early > 500);
    REQUIRE(early < 900);
    REQUIRE(late == 0);
}

TEST_CASE("annealed respects max_slot and never evicts the minimum") {
    auto policy = AdmissionPolicy::annealed(1e12, 0.9, 2);
    Rng rng(3);
    Slot slot;
    admit(slot, map_with({{0, 1}}, 1.0), policy, 0, rng);
    admit(slot, map_with({{0, 2}}, 5.0), policy, 0, rng);
    for (std::int32_t i = 0; i < 50; ++i) {
        admit(slot, map_with({{0, 1}, {1, i}}, 3.0 + i), policy, 0, rng);
        REQUIRE(slot.size() <= 2);
        bool min_present = false;
        for (const auto& m : slot.maps)
            if (m.cost == 1.0 && m.blocks == std::vector<Block>{{0, 1}}) min_present = true;
        REQUIRE(min_present);
    }
}

TEST_CASE("annealed rejects duplicates even at high temperature") {
    auto policy = AdmissionPolicy::annealed(1e12, 0.9, 10);
    Rng rng(3);
    Slot slot;
    REQUIRE(admit(slot, map_with({{0, 1}}, 2.0), policy, 0, rng).admitted);
    REQUIRE_FALSE(admit(slot, map_with({{0, 1}}, 2.0), policy, 0, rng).admitted);
}

TEST_CASE("policy parameter validation") {
    REQUIRE_FALSE(AdmissionPolicy::keep_all().invalid().has_value());
    REQUIRE_FALSE(AdmissionPolicy::least_cost().invalid().has_value());
    REQUIRE_FALSE(AdmissionPolicy::annealed(0.0, 0.9, 4).invalid().has_value());  // 0 = auto
    REQUIRE(AdmissionPolicy::annealed(1.0, 1.0, 4).invalid().has_value());
    REQUIRE(AdmissionPolicy::annealed(1.0, 0.0, 4).invalid().has_value());
    REQUIRE(AdmissionPolicy::annealed(1.0, -0.5, 4).invalid().has_value());
    REQUIRE(AdmissionPolicy::annealed(1.0, 0.9, 0).invalid().has_value());
    REQUIRE(AdmissionPolicy::annealed(std::numeric_limits<double>::quiet_NaN(), 0.9, 4)
                .invalid()
                .has_value());
}

TEST_CASE("auto temperature scales with mean latency and pipeline length") {
    auto inst = testsupport::k3_instance();
    auto policy = AdmissionPolicy::annealed(0.0, 0.9, 4);
    auto resolved = resolve_annealed_t0(policy, inst.graph, inst.path);
    REQUIRE(resolved.t0 == Catch::Approx((1.0 + 1.0 + 5.0) / 3.0 * 3.0));

    auto explicit_t0 = AdmissionPolicy::annealed(2.5, 0.9, 4);
    REQUIRE(resolve_annealed_t0(explicit_t0, inst.graph, inst.path).t0 == 2.5);
}

TEST_CASE("select_neighbors identity cases") {
    Rng rng(5);
    std::vector<NodeIndex> nbrs = {1, 2};
    REQUIRE(select_neighbors(nbrs, NeighborPolicy::all(), rng) == nbrs);
    REQUIRE(select_neighbors(nbrs, NeighborPolicy::random_k(5), rng) == nbrs);
    REQUIRE(select_neighbors(nbrs, NeighborPolicy::random_k(2), rng) == nbrs);
}

TEST_CASE("select_neighbors samples k distinct nodes, sorted") {
    std::vector<NodeIndex> nbrs = {3, 7, 9, 12, 20};
    auto policy = NeighborPolicy::random_k(3);
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        auto picked = select_neighbors(nbrs, policy, rng);
        REQUIRE(picked.size() == 3);
        REQUIRE(std::is_sorted(picked.begin(), picked.end()));
        std::set<NodeIndex> uniq(picked.begin(), picked.end());
        REQUIRE(uniq.size() == 3);
        for (NodeIndex v : picked)
            REQUIRE(std::find(nbrs.begin(), nbrs.end(), v) != nbrs.end());
    }
}

TEST_CASE("select_neighbors is seed-deterministic and eventually covers all") {
    std::vector<NodeIndex> nbrs = {1, 2, 3};
    auto policy = NeighborPolicy::random_k(1);
    Rng a(99), b(99);
    std::set<NodeIndex> seen;
    for (int i = 0; i < 50; ++i) {
        auto pa = select_neighbors(nbrs, policy, a);
        auto pb = select_neighbors(nbrs, policy, b);
        REQUIRE(pa == pb);
        seen.insert(pa[0]);
    }
    REQUIRE(seen.size() == 3);  // uniform sampling reaches every neighbor
}

TEST_CASE("slot erase keeps the duplicate index consistent") {
    Slot slot;
    slot.insert(map_with({{0, 1}}, 1.0));
    slot.insert(map_with({{0, 2}}, 2.0));
    slot.insert(map_with({{0, 3}}, 3.0));
    REQUIRE(slot.contains_blocks({{0, 2}}));
    slot.erase(1);  // swap-pop moves the last map into position 1
    REQUIRE_FALSE(slot.contains_blocks({{0, 2}}));
    REQUIRE(slot.contains_blocks({{0, 1}}));
    REQUIRE(slot.contains_blocks({{0, 3}}));
    REQUIRE(slot.size() == 2);
    slot.erase(0);
    REQUIRE_FALSE(slot.contains_blocks({{0, 1}}));
    REQUIRE(slot.contains_blocks({{0, 3}}));
}

TEST_CASE("min and max positions use cost with lexicographic tie-break") {
    Slot slot;
    slot.insert(map_with({{0, 2}}, 1.0));
    slot.insert(map_with({{0, 1}}, 1.0));
    slot.insert(map_with({{0, 3}}, 4.0));
    REQUIRE(slot.maps[slot.min_cost_pos()].blocks == std::vector<Block>{{0, 1}});
    REQUIRE(slot.maps[slot.max_cost_pos()].blocks == std::vector<Block>{{0, 3}});
}

TEST_CASE("rng helpers stay within their contracts") {
    Rng rng(123);
    for (int i = 0; i < 1000; ++i) {
        double u = u01(rng);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(uniform_index(rng, 7) < 7);
    }
    REQUIRE(mix_seed(1) != mix_seed(2));
    REQUIRE(mix_seed(1) == mix_seed(1));
}
