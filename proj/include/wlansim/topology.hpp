#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlansim {

struct AccessPoint {
    std::string id;
    double bandwidth_hz = 20e6;
    std::optional<double> capacity_cap_bps;
};

struct MobileStation {
    std::string id;
    std::map<std::string, double> reachable;   // ap id -> link snr in dB
    std::optional<std::string> associated_ap;
    double demand_up_kbps = 0.0;
    double demand_down_kbps = 0.0;

    double total_demand_kbps() const { return demand_up_kbps + demand_down_kbps; }
};

// A set of >=2 APs jointly reachable by at least one station.
struct OverlapZone {
    std::string id;
    std::set<std::string> aps;
};

struct NetworkState {
    std::vector<AccessPoint> aps;
    std::vector<MobileStation> stations;
    std::vector<OverlapZone> zones;

    const AccessPoint* find_ap(const std::string& id) const {
        for (const auto& ap : aps)
            if (ap.id == id) return &ap;
        return nullptr;
    }
    const MobileStation* find_station(const std::string& id) const {
        for (const auto& st : stations)
            if (st.id == id) return &st;
        return nullptr;
    }
    MobileStation* find_station(const std::string& id) {
        for (auto& st : stations)
            if (st.id == id) return &st;
        return nullptr;
    }
};

inline std::string zone_id_for(const std::set<std::string>& aps) {
    std::string id;
    for (const auto& ap : aps) {
        if (!id.empty()) id += '+';
        id += ap;
    }
    return id;
}

// One zone per distinct station-reachability set of size >= 2,
// ordered lexicographically by sorted AP ids.
inline std::vector<OverlapZone> derive_zones(const NetworkState& network) {
    std::set<std::set<std::string>> sets;
    for (const auto& st : network.stations) {
        if (st.reachable.size() < 2) continue;
        std::set<std::string> aps;
        for (const auto& [ap, snr] : st.reachable) aps.insert(ap);
        sets.insert(std::move(aps));
    }
    std::vector<OverlapZone> zones;
    for (const auto& s : sets) zones.push_back(OverlapZone{zone_id_for(s), s});
    return zones;
}

// T_i: offered load of one AP, the sum of up+down demand over its
// associated stations, in kbps.
inline double ap_load(const NetworkState& network, const std::string& ap_id) {
    if (network.find_ap(ap_id) == nullptr)
        throw std::invalid_argument("ap_load: unknown ap id '" + ap_id + "'");
    double load = 0.0;
    for (const auto& st : network.stations)
        if (st.associated_ap && *st.associated_ap == ap_id) load += st.total_demand_kbps();
    return load;
}

inline std::map<std::string, double> all_ap_loads(const NetworkState& network) {
    std::map<std::string, double> loads;
    for (const auto& ap : network.aps) loads[ap.id] = 0.0;
    for (const auto& st : network.stations)
        if (st.associated_ap) {
            auto it = loads.find(*st.associated_ap);
            if (it != loads.end()) it->second += st.total_demand_kbps();
        }
    return loads;
}

// Every invariant violation, each naming the offending id. Empty result means ok.
inline std::vector<std::string> validate(const NetworkState& network) {
    std::vector<std::string> violations;
    std::set<std::string> ap_ids;
    for (const auto& ap : network.aps) {
        if (!ap_ids.insert(ap.id).second)
            violations.push_back("duplicate ap id '" + ap.id + "'");
        if (!(ap.bandwidth_hz > 0))
            violations.push_back("ap '" + ap.id + "' has non-positive bandwidth_hz");
        if (ap.capacity_cap_bps && !(*ap.capacity_cap_bps > 0))
            violations.push_back("ap '" + ap.id + "' has non-positive capacity_cap_bps");
    }
    std::set<std::string> station_ids;
    for (const auto& st : network.stations) {
        if (!station_ids.insert(st.id).second)
            violations.push_back("duplicate station id '" + st.id + "'");
        for (const auto& [ap, snr] : st.reachable) {
            if (ap_ids.count(ap) == 0)
                violations.push_back("station '" + st.id + "' links unknown ap '" + ap + "'");
            if (snr < 0)
                violations.push_back("station '" + st.id + "' has negative snr_db for ap '" + ap + "'");
        }
        if (st.associated_ap && st.reachable.count(*st.associated_ap) == 0)
            violations.push_back("station '" + st.id + "' associated to unreachable ap '" +
                                 *st.associated_ap + "'");
        if (st.demand_up_kbps < 0 || st.demand_down_kbps < 0)
            violations.push_back("station '" + st.id + "' has negative demand");
    }
    return violations;
}

}  // namespace wlansim
