#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlansim/topology.hpp"

namespace wlansim::lba {

enum class Mode { Baseline, SnrAware };

struct BalanceParams {
    double alpha = 0.2;          // tolerance fraction, sane range [0.1, 0.2]
    Mode mode = Mode::Baseline;
    int max_moves = 32;
};

enum class LoadLabel { Overloaded, Balanced, Underloaded };

inline const char* to_string(LoadLabel label) {
    switch (label) {
        case LoadLabel::Overloaded: return "overloaded";
        case LoadLabel::Balanced: return "balanced";
        case LoadLabel::Underloaded: return "underloaded";
    }
    return "?";
}

struct LoadClassification {
    double anl_kbps = 0.0;
    double delta1_kbps = 0.0;
    double delta2_kbps = 0.0;
    std::map<std::string, LoadLabel> labels;  // ap id -> label
};

struct Move {
    std::string station_id;
    std::string from_ap;
    std::string to_ap;
    double snr_from_db = 0.0;
    double snr_to_db = 0.0;
};

struct MovePlan {
    std::vector<Move> moves;
    LoadClassification final_classification;
    bool converged = false;
};

// beta = (sum T_i)^2 / (n * sum T_i^2).  All-zero loads count as balanced (1).
inline double balance_index(const std::vector<double>& loads) {
    if (loads.empty()) throw std::invalid_argument("balance_index: empty load list");
    double sum = 0.0, sum_sq = 0.0;
    for (double t : loads) {
        if (t < 0) throw std::invalid_argument("balance_index: negative load");
        sum += t;
        sum_sq += t * t;
    }
    if (sum_sq == 0.0) return 1.0;
    return (sum * sum) / (static_cast<double>(loads.size()) * sum_sq);
}

inline double average_network_load(const std::vector<double>& loads) {
    if (loads.empty()) throw std::invalid_argument("average_network_load: empty network");
    double sum = 0.0;
    for (double t : loads) sum += t;
    return sum / static_cast<double>(loads.size());
}

// delta1 = ANL*(1+alpha), delta2 = ANL*(1-alpha)
inline std::pair<double, double> thresholds(double anl, double alpha) {
    return {anl * (1.0 + alpha), anl * (1.0 - alpha)};
}

// Boundaries count as balanced.
inline LoadLabel classify_ap(double load, double delta1, double delta2) {
    if (load > delta1) return LoadLabel::Overloaded;
    if (load < delta2) return LoadLabel::Underloaded;
    return LoadLabel::Balanced;
}

inline LoadClassification classify_network(const NetworkState& network, double alpha) {
    LoadClassification c;
    auto loads = all_ap_loads(network);
    std::vector<double> values;
    for (const auto& [id, load] : loads) values.push_back(load);
    c.anl_kbps = average_network_load(values);
    auto [d1, d2] = thresholds(c.anl_kbps, alpha);
    c.delta1_kbps = d1;
    c.delta2_kbps = d2;
    for (const auto& [id, load] : loads) c.labels[id] = classify_ap(load, d1, d2);
    return c;
}

inline double zone_balance_index(const OverlapZone& zone,
                                 const std::map<std::string, double>& loads) {
    std::vector<double> member_loads;
    for (const auto& ap : zone.aps) {
        auto it = loads.find(ap);
        member_loads.push_back(it == loads.end() ? 0.0 : it->second);
    }
    return balance_index(member_loads);
}

// Minimum balance index over all zones; vacuously 1 when there are no zones.
inline double min_zone_balance(const std::vector<OverlapZone>& zones,
                               const std::map<std::string, double>& loads) {
    double min_beta = 1.0;
    for (const auto& z : zones) min_beta = std::min(min_beta, zone_balance_index(z, loads));
    return min_beta;
}

// Zone with the smallest beta; ties go to the lexicographically smallest AP set.
inline const OverlapZone& find_zone_min(const NetworkState& network,
                                        const std::vector<OverlapZone>& zones) {
    if (zones.empty()) throw std::invalid_argument("find_zone_min: no overlap zones");
    auto loads = all_ap_loads(network);
    const OverlapZone* best = nullptr;
    double best_beta = 0.0;
    for (const auto& z : zones) {
        double beta = zone_balance_index(z, loads);
        if (best == nullptr || beta < best_beta ||
            (beta == best_beta && z.aps < best->aps)) {
            best = &z;
            best_beta = beta;
        }
    }
    return *best;
}

// A move to a new AP is allowed only when the destination SNR is strictly
// above half the source SNR, both in dB.
inline bool snr_gate(double snr_source_db, double snr_dest_db) {
    return snr_dest_db > snr_source_db / 2.0;
}

struct Candidate {
    std::string station_id;
    std::string to_ap;
    double snr_from_db = 0.0;
    double snr_to_db = 0.0;
    double distance = 0.0;  // |station demand - (overloaded load - ANL)|
};

// All movable stations of `overloaded_ap` into underloaded APs of `zone`,
// ranked by |demand - (load - ANL)| then station id.  Each station's
// destination is its reachable underloaded zone AP with the lowest load
// (ties by AP id); in SnrAware mode only gate-passing destinations count.
inline std::vector<Candidate> ranked_candidates(const NetworkState& network,
                                                const std::string& overloaded_ap, double anl,
                                                const OverlapZone& zone,
                                                const BalanceParams& params,
                                                const std::set<std::string>& excluded = {}) {
    auto loads = all_ap_loads(network);
    auto [d1, d2] = thresholds(anl, params.alpha);
    double diff = loads.at(overloaded_ap) - anl;

    std::vector<Candidate> out;
    for (const auto& st : network.stations) {
        if (!st.associated_ap || *st.associated_ap != overloaded_ap) continue;
        if (excluded.count(st.id)) continue;
        double snr_from = st.reachable.at(overloaded_ap);

        const std::string* dest = nullptr;
        for (const auto& [ap, snr_to] : st.reachable) {
            if (ap == overloaded_ap || zone.aps.count(ap) == 0) continue;
            if (classify_ap(loads.at(ap), d1, d2) != LoadLabel::Underloaded) continue;
            if (params.mode == Mode::SnrAware && !snr_gate(snr_from, snr_to)) continue;
            if (dest == nullptr || loads.at(ap) < loads.at(*dest) ||
                (loads.at(ap) == loads.at(*dest) && ap < *dest))
                dest = &ap;
        }
        if (dest == nullptr) continue;

        Candidate c;
        c.station_id = st.id;
        c.to_ap = *dest;
        c.snr_from_db = snr_from;
        c.snr_to_db = st.reachable.at(*dest);
        c.distance = std::abs(st.total_demand_kbps() - diff);
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.station_id < b.station_id;
    });
    return out;
}

// The station whose total demand is nearest to (load(overloaded_ap) - ANL).
inline std::optional<Candidate> select_candidate(const NetworkState& network,
                                                 const std::string& overloaded_ap, double anl,
                                                 const OverlapZone& zone,
                                                 const BalanceParams& params) {
    auto ranked = ranked_candidates(network, overloaded_ap, anl, zone, params);
    if (ranked.empty()) return std::nullopt;
    return ranked.front();
}

namespace detail {

// Zones holding at least one overloaded AP, in ascending beta order
// (ties by AP set), then that zone's overloaded APs by descending load.
struct ZoneTarget {
    const OverlapZone* zone;
    double beta;
    std::vector<std::string> overloaded_aps;
};

inline std::vector<ZoneTarget> overloaded_zone_targets(const NetworkState& network,
                                                       const std::vector<OverlapZone>& zones,
                                                       const LoadClassification& cls) {
    auto loads = all_ap_loads(network);
    std::vector<ZoneTarget> targets;
    for (const auto& z : zones) {
        ZoneTarget t{&z, zone_balance_index(z, loads), {}};
        for (const auto& ap : z.aps)
            if (cls.labels.at(ap) == LoadLabel::Overloaded) t.overloaded_aps.push_back(ap);
        if (t.overloaded_aps.empty()) continue;
        std::sort(t.overloaded_aps.begin(), t.overloaded_aps.end(),
                  [&](const std::string& a, const std::string& b) {
                      if (loads.at(a) != loads.at(b)) return loads.at(a) > loads.at(b);
                      return a < b;
                  });
        targets.push_back(std::move(t));
    }
    std::sort(targets.begin(), targets.end(), [](const ZoneTarget& a, const ZoneTarget& b) {
        if (a.beta != b.beta) return a.beta < b.beta;
        return a.zone->aps < b.zone->aps;
    });
    return targets;
}

}  // namespace detail

// One full controller run.  Each iteration reclassifies the network, picks
// the minimum-beta zone holding an overloaded AP and moves the candidate
// whose demand is nearest to the load excess.  A candidate is only accepted
// when the move does not lower the minimum zone balance index; otherwise the
// next-nearest candidate (then the next AP, then the next zone) is tried.
// Stations move at most once per plan.
inline MovePlan rebalance(const NetworkState& initial, const BalanceParams& params) {
    {
        auto violations = validate(initial);
        if (!violations.empty())
            throw std::invalid_argument("rebalance: invalid network: " + violations.front());
        if (params.max_moves < 1)
            throw std::invalid_argument("rebalance: max_moves must be >= 1");
        if (params.alpha < 0 || params.alpha > 1)
            throw std::invalid_argument("rebalance: alpha outside [0,1]");
    }

    NetworkState work = initial;
    work.zones = derive_zones(work);

    MovePlan plan;
    std::set<std::string> moved;

    while (true) {
        auto cls = classify_network(work, params.alpha);
        bool any_overloaded = false;
        for (const auto& [id, label] : cls.labels)
            if (label == LoadLabel::Overloaded) any_overloaded = true;
        if (!any_overloaded) {
            plan.converged = true;
            plan.final_classification = cls;
            return plan;
        }
        if (static_cast<int>(plan.moves.size()) >= params.max_moves) break;

        auto loads = all_ap_loads(work);
        double beta_before = min_zone_balance(work.zones, loads);

        bool applied = false;
        for (const auto& target : detail::overloaded_zone_targets(work, work.zones, cls)) {
            for (const auto& ap : target.overloaded_aps) {
                auto ranked =
                    ranked_candidates(work, ap, cls.anl_kbps, *target.zone, params, moved);
                for (const auto& cand : ranked) {
                    auto trial = loads;
                    double demand =
                        work.find_station(cand.station_id)->total_demand_kbps();
                    trial[ap] -= demand;
                    trial[cand.to_ap] += demand;
                    if (min_zone_balance(work.zones, trial) < beta_before) continue;

                    work.find_station(cand.station_id)->associated_ap = cand.to_ap;
                    moved.insert(cand.station_id);
                    plan.moves.push_back(
                        Move{cand.station_id, ap, cand.to_ap, cand.snr_from_db, cand.snr_to_db});
                    applied = true;
                    break;
                }
                if (applied) break;
            }
            if (applied) break;
        }
        if (!applied) break;  // no acceptable candidate anywhere
    }

    plan.converged = false;
    plan.final_classification = classify_network(work, params.alpha);
    return plan;
}

struct BestAssignment {
    std::map<std::string, std::string> assignment;  // station id -> ap id
    double min_zone_beta = 1.0;
};

// Exhaustive oracle for small instances: evaluates every feasible
// station->AP assignment and returns one maximizing the minimum zone
// balance index.  The initial assignment wins ties; otherwise the
// lexicographically smallest assignment does.
inline BestAssignment brute_force_best_assignment(const NetworkState& network,
                                                  const BalanceParams& params) {
    if (network.stations.size() > 10)
        throw std::invalid_argument("brute_force_best_assignment: more than 10 stations");
    double combos = 1.0;
    for (const auto& st : network.stations) combos *= std::max<size_t>(1, st.reachable.size());
    if (combos > 1e6)
        throw std::invalid_argument("brute_force_best_assignment: too many assignments");

    std::vector<OverlapZone> zones = derive_zones(network);

    // stations in id order so that assignment tuples compare lexicographically
    std::vector<const MobileStation*> stations;
    for (const auto& st : network.stations) stations.push_back(&st);
    std::sort(stations.begin(), stations.end(),
              [](const MobileStation* a, const MobileStation* b) { return a->id < b->id; });

    std::vector<std::vector<std::string>> choices(stations.size());
    for (size_t i = 0; i < stations.size(); ++i) {
        const auto& st = *stations[i];
        for (const auto& [ap, snr] : st.reachable) {
            if (params.mode == Mode::SnrAware && st.associated_ap && ap != *st.associated_ap &&
                !snr_gate(st.reachable.at(*st.associated_ap), snr))
                continue;
            choices[i].push_back(ap);
        }
        if (choices[i].empty() && st.associated_ap) choices[i].push_back(*st.associated_ap);
    }

    std::map<std::string, std::string> initial;
    for (const auto* st : stations)
        if (st->associated_ap) initial[st->id] = *st->associated_ap;

    BestAssignment best;
    bool have_best = false;
    bool best_is_initial = false;

    std::vector<size_t> idx(stations.size(), 0);
    auto evaluate = [&]() {
        std::map<std::string, double> loads;
        for (const auto& ap : network.aps) loads[ap.id] = 0.0;
        std::map<std::string, std::string> assignment;
        for (size_t i = 0; i < stations.size(); ++i) {
            if (choices[i].empty()) continue;
            const auto& ap = choices[i][idx[i]];
            assignment[stations[i]->id] = ap;
            loads[ap] += stations[i]->total_demand_kbps();
        }
        double beta = min_zone_balance(zones, loads);
        bool is_initial = assignment == initial;
        if (!have_best || beta > best.min_zone_beta ||
            (beta == best.min_zone_beta && is_initial && !best_is_initial) ||
            (beta == best.min_zone_beta && !best_is_initial &&
             assignment < best.assignment)) {
            best.assignment = assignment;
            best.min_zone_beta = beta;
            have_best = true;
            best_is_initial = is_initial;
        }
    };

    while (true) {
        evaluate();
        size_t pos = 0;
        while (pos < idx.size()) {
            if (choices[pos].empty() || ++idx[pos] == choices[pos].size()) {
                idx[pos] = 0;
                ++pos;
            } else {
                break;
            }
        }
        if (pos == idx.size()) break;
    }
    return best;
}

}  // namespace wlansim::lba
