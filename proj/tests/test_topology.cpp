#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "wlansim/topology.hpp"

using namespace wlansim;

namespace {

NetworkState two_ap_network() {
    NetworkState net;
    net.aps = {AccessPoint{"ap1", 20e6, {}}, AccessPoint{"ap2", 20e6, {}}};
    net.stations = {
        MobileStation{"s1", {{"ap1", 40.0}, {"ap2", 30.0}}, "ap1", 100, 400},
        MobileStation{"s2", {{"ap1", 35.0}}, "ap1", 50, 50},
        MobileStation{"s3", {{"ap2", 45.0}}, "ap2", 10, 20},
    };
    return net;
}

}  // namespace

TEST_CASE("derive_zones collapses duplicate reachability sets") {
    NetworkState net;
    net.aps = {AccessPoint{"ap1"}, AccessPoint{"ap2"}};
    net.stations = {
        MobileStation{"a", {{"ap1", 30}, {"ap2", 30}}, std::nullopt, 0, 0},
        MobileStation{"b", {{"ap1", 20}, {"ap2", 25}}, std::nullopt, 0, 0},
    };
    auto zones = derive_zones(net);
    REQUIRE(zones.size() == 1);
    CHECK(zones[0].aps == std::set<std::string>{"ap1", "ap2"});
}

TEST_CASE("derive_zones ignores single-AP stations") {
    NetworkState net;
    net.aps = {AccessPoint{"ap1"}, AccessPoint{"ap2"}};
    net.stations = {
        MobileStation{"a", {{"ap1", 30}}, std::nullopt, 0, 0},
        MobileStation{"b", {{"ap2", 25}}, std::nullopt, 0, 0},
    };
    CHECK(derive_zones(net).empty());
}

TEST_CASE("derive_zones keeps distinct overlapping sets") {
    NetworkState net;
    net.aps = {AccessPoint{"ap1"}, AccessPoint{"ap2"}, AccessPoint{"ap3"}};
    net.stations = {
        MobileStation{"a", {{"ap1", 30}, {"ap2", 30}}, std::nullopt, 0, 0},
        MobileStation{"b", {{"ap2", 20}, {"ap3", 25}}, std::nullopt, 0, 0},
    };
    auto zones = derive_zones(net);
    REQUIRE(zones.size() == 2);
    CHECK(zones[0].aps == std::set<std::string>{"ap1", "ap2"});
    CHECK(zones[1].aps == std::set<std::string>{"ap2", "ap3"});
}

TEST_CASE("derive_zones is idempotent and order independent") {
    auto net = two_ap_network();
    auto zones = derive_zones(net);
    net.zones = zones;
    CHECK(derive_zones(net) == zones);

    std::mt19937 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        auto shuffled = net;
        std::shuffle(shuffled.stations.begin(), shuffled.stations.end(), rng);
        CHECK(derive_zones(shuffled) == zones);
    }
}

TEST_CASE("ap_load sums up and down demand of associated stations") {
    auto net = two_ap_network();
    CHECK(ap_load(net, "ap1") == 600.0);  // (100+400) + (50+50)
    CHECK(ap_load(net, "ap2") == 30.0);

    net.stations[2].associated_ap.reset();
    CHECK(ap_load(net, "ap2") == 0.0);

    CHECK_THROWS_AS(ap_load(net, "nope"), std::invalid_argument);
}

TEST_CASE("ap_load is additive") {
    auto net = two_ap_network();
    double before_ap1 = ap_load(net, "ap1");
    double before_ap2 = ap_load(net, "ap2");
    net.stations.push_back(MobileStation{"s4", {{"ap1", 33}}, "ap1", 70, 30});
    CHECK(ap_load(net, "ap1") == before_ap1 + 100.0);
    CHECK(ap_load(net, "ap2") == before_ap2);
}

TEST_CASE("total load equals total associated demand") {
    auto net = two_ap_network();
    double total = 0.0;
    for (const auto& ap : net.aps) total += ap_load(net, ap.id);
    double demand = 0.0;
    for (const auto& st : net.stations)
        if (st.associated_ap) demand += st.total_demand_kbps();
    CHECK(total == Catch::Approx(demand));
}

TEST_CASE("validate flags association to unreachable AP") {
    auto net = two_ap_network();
    net.stations[1].associated_ap = "ap2";  // s2 only reaches ap1
    auto violations = validate(net);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("s2") != std::string::npos);
    CHECK(violations[0].find("ap2") != std::string::npos);
}

TEST_CASE("validate flags duplicate AP ids") {
    auto net = two_ap_network();
    net.aps.push_back(AccessPoint{"ap1"});
    auto violations = validate(net);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].find("ap1") != std::string::npos);
}

TEST_CASE("validate accepts a well-formed network") {
    CHECK(validate(two_ap_network()).empty());
}
