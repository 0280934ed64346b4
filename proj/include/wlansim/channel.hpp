#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlansim/topology.hpp"

namespace wlansim::channel {

inline double db_to_linear(double snr_db) {
    if (!std::isfinite(snr_db))
        throw std::invalid_argument("db_to_linear: snr_db must be finite");
    return std::pow(10.0, snr_db / 10.0);
}

// C_max = BW * log2(1 + SNR), SNR as a linear ratio.
inline double shannon_capacity(double bandwidth_hz, double snr_linear) {
    if (bandwidth_hz < 0) throw std::invalid_argument("shannon_capacity: negative bandwidth");
    if (snr_linear < 0) throw std::invalid_argument("shannon_capacity: negative snr");
    return bandwidth_hz * std::log2(1.0 + snr_linear);
}

struct LinkBudget {
    double snr_db = 0.0;
    double snr_linear = 1.0;
    double capacity_bps = 0.0;
};

inline LinkBudget link_budget(const AccessPoint& ap, double snr_db) {
    LinkBudget lb;
    lb.snr_db = snr_db;
    lb.snr_linear = db_to_linear(snr_db);
    lb.capacity_bps = shannon_capacity(ap.bandwidth_hz, lb.snr_linear);
    if (ap.capacity_cap_bps && lb.capacity_bps > *ap.capacity_cap_bps)
        lb.capacity_bps = *ap.capacity_cap_bps;
    return lb;
}

struct MemberDemand {
    std::string station_id;
    double demand_bps = 0.0;
    double snr_db = 0.0;
};

struct AirtimeShare {
    struct Entry {
        std::string station_id;
        double airtime = 0.0;       // fraction of the medium actually used
        double achieved_bps = 0.0;
        bool starved = false;       // zero-capacity link with nonzero demand
    };
    std::vector<Entry> entries;
    double total_airtime = 0.0;
};

// Proportional airtime contention: each member requests demand/capacity of
// the medium; when the total exceeds 1 every request is scaled by 1/total.
inline AirtimeShare effective_throughput(const AccessPoint& ap,
                                         const std::vector<MemberDemand>& members) {
    AirtimeShare share;
    double requested = 0.0;
    std::vector<double> cap(members.size());
    for (size_t i = 0; i < members.size(); ++i) {
        if (members[i].demand_bps < 0)
            throw std::invalid_argument("effective_throughput: negative demand for station '" +
                                        members[i].station_id + "'");
        cap[i] = link_budget(ap, members[i].snr_db).capacity_bps;
        if (cap[i] > 0) requested += members[i].demand_bps / cap[i];
    }
    double scale = requested > 1.0 ? 1.0 / requested : 1.0;
    for (size_t i = 0; i < members.size(); ++i) {
        AirtimeShare::Entry e;
        e.station_id = members[i].station_id;
        if (cap[i] <= 0) {
            e.starved = members[i].demand_bps > 0;
            e.airtime = 0.0;
            e.achieved_bps = 0.0;
        } else {
            e.airtime = members[i].demand_bps / cap[i] * scale;
            e.achieved_bps = members[i].demand_bps * scale;
        }
        share.total_airtime += e.airtime;
        share.entries.push_back(std::move(e));
    }
    return share;
}

// size/rate; rate 0 parks the packet (infinite service).
inline double packet_service_time(double size_bits, double achieved_bps) {
    if (size_bits < 0) throw std::invalid_argument("packet_service_time: negative size");
    if (achieved_bps < 0) throw std::invalid_argument("packet_service_time: negative rate");
    if (size_bits == 0) return 0.0;
    if (achieved_bps == 0) return std::numeric_limits<double>::infinity();
    return size_bits / achieved_bps;
}

}  // namespace wlansim::channel
