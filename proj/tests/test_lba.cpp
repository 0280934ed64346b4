#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_support.hpp"
#include "wlansim/lba.hpp"

using namespace wlansim;
using namespace wlansim::lba;

namespace {

// loads 900/100, one movable station of demand 400 at the loaded AP
NetworkState nine_hundred_hundred(double movable_snr_to_ap2) {
    NetworkState net;
    net.aps = {AccessPoint{"ap1", 5e4, {}}, AccessPoint{"ap2", 5e4, {}}};
    net.stations = {
        MobileStation{"fixed1", {{"ap1", 70.0}}, "ap1", 500, 0},
        MobileStation{"mov", {{"ap1", 80.0}, {"ap2", movable_snr_to_ap2}}, "ap1", 400, 0},
        MobileStation{"fixed2", {{"ap2", 70.0}}, "ap2", 100, 0},
    };
    net.zones = derive_zones(net);
    return net;
}

}  // namespace

TEST_CASE("balance_index basics") {
    CHECK(balance_index({7.0, 7.0}) == Catch::Approx(1.0));
    CHECK(balance_index({42.0, 0.0}) == Catch::Approx(0.5));
    CHECK(balance_index({1.0, 2.0, 3.0}) ==
          Catch::Approx(6.0 / 7.0).epsilon(1e-9));
    CHECK(balance_index({0.0, 0.0, 0.0}) == 1.0);
    CHECK_THROWS_AS(balance_index({}), std::invalid_argument);
    CHECK_THROWS_AS(balance_index({1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("balance_index is scale invariant and bounded") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = 1 + rng() % 6;
        std::vector<double> loads(n);
        bool all_zero = true;
        for (auto& l : loads) {
            l = static_cast<double>(rng() % 1000);
            all_zero &= l == 0.0;
        }
        if (all_zero) loads[0] = 1.0;
        double beta = balance_index(loads);
        CHECK(beta >= 1.0 / static_cast<double>(n) - 1e-12);
        CHECK(beta <= 1.0 + 1e-12);
        for (double c : {0.5, 3.0, 1e6}) {
            auto scaled = loads;
            for (auto& l : scaled) l *= c;
            CHECK(balance_index(scaled) == Catch::Approx(beta).epsilon(1e-12));
        }
        bool all_equal = true;
        for (auto& l : loads) all_equal &= l == loads[0];
        if (all_equal) CHECK(beta == Catch::Approx(1.0));
        if (beta == 1.0 && loads[0] != 0.0)
            for (auto& l : loads) CHECK(l == loads[0]);
    }
}

TEST_CASE("average_network_load") {
    CHECK(average_network_load({123.0}) == 123.0);
    CHECK(average_network_load({0.0, 0.0}) == 0.0);
    CHECK(average_network_load({2.0, 4.0, 6.0}) == Catch::Approx(4.0));
    CHECK_THROWS_AS(average_network_load({}), std::invalid_argument);
}

TEST_CASE("thresholds") {
    auto [d1, d2] = thresholds(1000.0, 0.2);
    CHECK(d1 == Catch::Approx(1200.0).epsilon(1e-9));
    CHECK(d2 == Catch::Approx(800.0).epsilon(1e-9));
    CHECK(thresholds(500.0, 0.0) == std::pair{500.0, 500.0});
    CHECK(thresholds(0.0, 0.15) == std::pair{0.0, 0.0});
}

TEST_CASE("classify_ap with balanced boundaries") {
    CHECK(classify_ap(1300, 1200, 800) == LoadLabel::Overloaded);
    CHECK(classify_ap(1000, 1200, 800) == LoadLabel::Balanced);
    CHECK(classify_ap(700, 1200, 800) == LoadLabel::Underloaded);
    CHECK(classify_ap(1200, 1200, 800) == LoadLabel::Balanced);
    CHECK(classify_ap(800, 1200, 800) == LoadLabel::Balanced);
}

TEST_CASE("classification is invariant under load scaling") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> loads(3);
        for (auto& l : loads) l = static_cast<double>(rng() % 2000);
        double anl = average_network_load(loads);
        auto [d1, d2] = thresholds(anl, 0.2);
        for (double c : {2.0, 10.0}) {
            std::vector<double> scaled = loads;
            for (auto& l : scaled) l *= c;
            double anl_c = average_network_load(scaled);
            auto [d1c, d2c] = thresholds(anl_c, 0.2);
            for (size_t i = 0; i < loads.size(); ++i)
                CHECK(classify_ap(loads[i], d1, d2) == classify_ap(scaled[i], d1c, d2c));
        }
    }
}

TEST_CASE("find_zone_min picks the least balanced zone") {
    NetworkState net;
    net.aps = {AccessPoint{"a1", 5e4, {}}, AccessPoint{"a2", 5e4, {}},
               AccessPoint{"b1", 5e4, {}}, AccessPoint{"b2", 5e4, {}}};
    net.stations = {
        MobileStation{"za", {{"a1", 40}, {"a2", 40}}, std::nullopt, 0, 0},
        MobileStation{"zb", {{"b1", 40}, {"b2", 40}}, std::nullopt, 0, 0},
        MobileStation{"la1", {{"a1", 40}}, "a1", 5, 0},
        MobileStation{"la2", {{"a2", 40}}, "a2", 5, 0},
        MobileStation{"lb1", {{"b1", 40}}, "b1", 8, 0},
        MobileStation{"lb2", {{"b2", 40}}, "b2", 2, 0},
    };
    net.zones = derive_zones(net);
    REQUIRE(net.zones.size() == 2);
    CHECK(find_zone_min(net, net.zones).aps == std::set<std::string>{"b1", "b2"});

    // single zone
    std::vector<OverlapZone> one = {net.zones[0]};
    CHECK(find_zone_min(net, one).aps == net.zones[0].aps);

    CHECK_THROWS_AS(find_zone_min(net, {}), std::invalid_argument);
}

TEST_CASE("find_zone_min breaks beta ties lexicographically") {
    NetworkState net;
    net.aps = {AccessPoint{"a1", 5e4, {}}, AccessPoint{"a2", 5e4, {}},
               AccessPoint{"b1", 5e4, {}}, AccessPoint{"b2", 5e4, {}}};
    net.stations = {
        MobileStation{"za", {{"a1", 40}, {"a2", 40}}, std::nullopt, 0, 0},
        MobileStation{"zb", {{"b1", 40}, {"b2", 40}}, std::nullopt, 0, 0},
        MobileStation{"la1", {{"a1", 40}}, "a1", 6, 0},
        MobileStation{"lb1", {{"b1", 40}}, "b1", 6, 0},
    };
    net.zones = derive_zones(net);
    CHECK(find_zone_min(net, net.zones).aps == std::set<std::string>{"a1", "a2"});
}

TEST_CASE("snr_gate blocks at or below half the source SNR") {
    CHECK(snr_gate(80.0, 50.0));
    CHECK_FALSE(snr_gate(80.0, 40.0));  // equal to half: blocked
    CHECK_FALSE(snr_gate(80.0, 30.0));
    CHECK(snr_gate(60.0, 60.0));
    CHECK(snr_gate(45.0, 45.0));
}

TEST_CASE("select_candidate prefers the load nearest the excess") {
    NetworkState net;
    net.aps = {AccessPoint{"a", 5e4, {}}, AccessPoint{"b", 5e4, {}}};
    net.stations = {
        MobileStation{"s1", {{"a", 60}, {"b", 50}}, "a", 2, 0},
        MobileStation{"s2", {{"a", 60}, {"b", 50}}, "a", 3.5, 0},
        MobileStation{"s3", {{"a", 60}, {"b", 50}}, "a", 5, 0},
    };
    net.zones = derive_zones(net);
    BalanceParams params;
    // load(a) = 10.5, pass anl = 6.5 so the excess is 4
    auto cand = select_candidate(net, "a", 6.5, net.zones[0], params);
    REQUIRE(cand.has_value());
    CHECK(cand->station_id == "s2");
    CHECK(cand->to_ap == "b");
}

TEST_CASE("select_candidate tie-breaks by station id") {
    NetworkState net;
    net.aps = {AccessPoint{"a", 5e4, {}}, AccessPoint{"b", 5e4, {}}};
    net.stations = {
        MobileStation{"s1", {{"a", 60}, {"b", 50}}, "a", 3, 0},
        MobileStation{"s2", {{"a", 60}, {"b", 50}}, "a", 5, 0},
    };
    net.zones = derive_zones(net);
    BalanceParams params;
    auto cand = select_candidate(net, "a", 4.0, net.zones[0], params);
    REQUIRE(cand.has_value());
    CHECK(cand->station_id == "s1");  // |3-4| == |5-4|, lower id wins
}

TEST_CASE("select_candidate honors the SNR gate") {
    NetworkState net;
    net.aps = {AccessPoint{"a", 5e4, {}}, AccessPoint{"b", 5e4, {}}};
    net.stations = {
        MobileStation{"only", {{"a", 80}, {"b", 30}}, "a", 400, 0},
    };
    net.zones = derive_zones(net);
    BalanceParams params;
    params.mode = Mode::SnrAware;
    CHECK_FALSE(select_candidate(net, "a", 200.0, net.zones[0], params).has_value());
    params.mode = Mode::Baseline;
    CHECK(select_candidate(net, "a", 200.0, net.zones[0], params).has_value());
}

TEST_CASE("rebalance leaves a balanced network alone") {
    NetworkState net;
    net.aps = {AccessPoint{"ap1", 5e4, {}}, AccessPoint{"ap2", 5e4, {}}};
    net.stations = {
        MobileStation{"s1", {{"ap1", 50}, {"ap2", 50}}, "ap1", 100, 0},
        MobileStation{"s2", {{"ap1", 50}, {"ap2", 50}}, "ap2", 100, 0},
    };
    auto plan = rebalance(net, BalanceParams{});
    CHECK(plan.moves.empty());
    CHECK(plan.converged);
}

TEST_CASE("rebalance equalizes the 900/100 scenario") {
    auto net = nine_hundred_hundred(70.0);
    BalanceParams params;
    auto plan = rebalance(net, params);
    REQUIRE(plan.moves.size() == 1);
    CHECK(plan.moves[0].station_id == "mov");
    CHECK(plan.moves[0].from_ap == "ap1");
    CHECK(plan.moves[0].to_ap == "ap2");
    CHECK(plan.converged);

    auto final_net = testsupport::apply_plan(net, plan);
    CHECK(ap_load(final_net, "ap1") == Catch::Approx(500.0));
    CHECK(ap_load(final_net, "ap2") == Catch::Approx(500.0));
    CHECK(testsupport::independent_min_zone_beta(final_net) == Catch::Approx(1.0));

    auto oracle = brute_force_best_assignment(net, params);
    CHECK(oracle.min_zone_beta == Catch::Approx(1.0));
    CHECK(oracle.assignment.at("mov") == "ap2");
}

TEST_CASE("rebalance in SnrAware mode refuses a gated move") {
    auto net = nine_hundred_hundred(39.999);  // just below 80/2
    BalanceParams params;
    params.mode = Mode::SnrAware;
    auto plan = rebalance(net, params);
    CHECK(plan.moves.empty());
    CHECK_FALSE(plan.converged);

    // at exactly half it is still blocked
    params.mode = Mode::SnrAware;
    auto blocked = rebalance(nine_hundred_hundred(40.0), params);
    CHECK(blocked.moves.empty());

    auto allowed = rebalance(nine_hundred_hundred(40.001), params);
    CHECK(allowed.moves.size() == 1);
}

TEST_CASE("rebalance rejects an invalid network") {
    NetworkState net;
    net.aps = {AccessPoint{"ap1", 5e4, {}}};
    net.stations = {MobileStation{"s1", {{"nope", 40}}, std::nullopt, 10, 0}};
    CHECK_THROWS_AS(rebalance(net, BalanceParams{}), std::invalid_argument);
}

TEST_CASE("rebalance properties on random networks") {
    std::mt19937_64 rng(20260810);
    for (int trial = 0; trial < 150; ++trial) {
        auto net = testsupport::random_network(rng);
        BalanceParams params;
        params.mode = trial % 2 == 0 ? Mode::Baseline : Mode::SnrAware;
        params.max_moves = 16;

        auto plan = rebalance(net, params);
        CHECK(plan.moves.size() <= static_cast<size_t>(params.max_moves));

        // monotone minimum zone balance
        auto final_net = testsupport::apply_plan(net, plan);
        double before = testsupport::independent_min_zone_beta(net);
        double after = testsupport::independent_min_zone_beta(final_net);
        CHECK(after >= before - 1e-12);

        // no station moved twice, gate respected, destinations reachable
        std::set<std::string> seen;
        for (const auto& move : plan.moves) {
            CHECK(seen.insert(move.station_id).second);
            const auto* st = net.find_station(move.station_id);
            REQUIRE(st != nullptr);
            CHECK(st->reachable.count(move.to_ap) == 1);
            if (params.mode == Mode::SnrAware)
                CHECK(snr_gate(move.snr_from_db, move.snr_to_db));
        }

        // final classification agrees with an independent recomputation
        auto expected = testsupport::independent_classification(final_net, params.alpha);
        CHECK(plan.final_classification.anl_kbps == Catch::Approx(expected.anl));
        for (const auto& [ap, label] : plan.final_classification.labels)
            CHECK(to_string(label) == expected.labels.at(ap));

        // converged means nothing is overloaded
        if (plan.converged)
            for (const auto& [ap, label] : expected.labels) CHECK(label != "overloaded");

        // pure function of its inputs
        auto again = rebalance(net, params);
        REQUIRE(again.moves.size() == plan.moves.size());
        for (size_t i = 0; i < plan.moves.size(); ++i) {
            CHECK(again.moves[i].station_id == plan.moves[i].station_id);
            CHECK(again.moves[i].to_ap == plan.moves[i].to_ap);
        }
    }
}

TEST_CASE("brute force oracle enforces instance caps") {
    NetworkState net;
    net.aps = {AccessPoint{"ap1", 5e4, {}}};
    for (int i = 0; i < 11; ++i)
        net.stations.push_back(
            MobileStation{"s" + std::to_string(i), {{"ap1", 40}}, "ap1", 10, 0});
    CHECK_THROWS_AS(brute_force_best_assignment(net, BalanceParams{}),
                    std::invalid_argument);
}

TEST_CASE("brute force returns the sole assignment for one station") {
    NetworkState net;
    net.aps = {AccessPoint{"ap1", 5e4, {}}};
    net.stations = {MobileStation{"s1", {{"ap1", 40}}, "ap1", 10, 0}};
    auto best = brute_force_best_assignment(net, BalanceParams{});
    CHECK(best.assignment.at("s1") == "ap1");
    CHECK(best.min_zone_beta == 1.0);  // no zones: vacuously balanced
}

TEST_CASE("brute force keeps the initial assignment when nothing improves") {
    NetworkState net;
    net.aps = {AccessPoint{"ap1", 5e4, {}}, AccessPoint{"ap2", 5e4, {}}};
    net.stations = {
        MobileStation{"s1", {{"ap1", 50}, {"ap2", 50}}, "ap1", 100, 0},
        MobileStation{"s2", {{"ap1", 50}, {"ap2", 50}}, "ap2", 100, 0},
    };
    auto best = brute_force_best_assignment(net, BalanceParams{});
    CHECK(best.min_zone_beta == Catch::Approx(1.0));
    CHECK(best.assignment.at("s1") == "ap1");
    CHECK(best.assignment.at("s2") == "ap2");
}

TEST_CASE("brute force respects the gate in SnrAware mode") {
    auto net = nine_hundred_hundred(30.0);
    BalanceParams params;
    params.mode = Mode::SnrAware;
    auto best = brute_force_best_assignment(net, params);
    CHECK(best.assignment.at("mov") == "ap1");  // gate forbids the only improvement
    params.mode = Mode::Baseline;
    auto ungated = brute_force_best_assignment(net, params);
    CHECK(ungated.assignment.at("mov") == "ap2");
}
