#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wlansim/text.hpp"

namespace wlansim::cli {

enum class LbaMode { Off, Baseline, SnrAware };

inline const char* to_string(LbaMode mode) {
    switch (mode) {
        case LbaMode::Off: return "off";
        case LbaMode::Baseline: return "baseline";
        case LbaMode::SnrAware: return "snr-aware";
    }
    return "?";
}

inline std::optional<LbaMode> lba_mode_from_string(std::string_view s) {
    if (s == "off") return LbaMode::Off;
    if (s == "baseline") return LbaMode::Baseline;
    if (s == "snr-aware") return LbaMode::SnrAware;
    return std::nullopt;
}

enum class ProfileKind { None, Video, Ftp, Http };

struct VideoProfile {
    int fps = 15;  // camera supports 1, 3, 7, 15, 25
    double frame_size_bits = 30000;
    int packets_per_frame = 5;
    bool operator==(const VideoProfile&) const = default;
};

struct FtpProfile {
    std::optional<double> rate_kbps;  // defaults to the station's total demand
    double packet_size_bits = 12000;
    bool operator==(const FtpProfile&) const = default;
};

struct HttpProfile {
    std::optional<double> rate_kbps;  // on-state rate; defaults to total demand
    double mean_on_s = 1.0;
    double mean_off_s = 1.0;
    double packet_size_bits = 12000;
    bool operator==(const HttpProfile&) const = default;
};

struct ApSpec {
    std::string id;
    double bandwidth_hz = 20e6;
    std::optional<double> capacity_cap_bps;
    bool operator==(const ApSpec&) const = default;
};

struct StationSpec {
    std::string id;
    std::map<std::string, double> links;  // ap id -> snr_db
    double demand_up_kbps = 0.0;
    double demand_down_kbps = 0.0;
    double join_time_s = 0.0;
    std::optional<double> leave_time_s;
    ProfileKind profile = ProfileKind::None;
    VideoProfile video;
    FtpProfile ftp;
    HttpProfile http;
    bool operator==(const StationSpec&) const = default;
};

struct SimSection {
    double horizon_s = 10.0;
    uint64_t seed = 0;
    double alpha = 0.2;
    LbaMode lba_mode = LbaMode::Off;
    double handoff_latency_s = 0.05;
    int queue_capacity = 100;
    int max_moves = 32;
    bool operator==(const SimSection&) const = default;
};

struct MonitorSection {
    std::vector<std::string> flows;  // flow id == station id
    int video_width = 64;
    int video_height = 64;
    bool operator==(const MonitorSection&) const = default;
};

struct Scenario {
    std::vector<ApSpec> aps;
    std::vector<StationSpec> stations;
    SimSection sim;
    MonitorSection monitor;
    bool operator==(const Scenario&) const = default;

    const StationSpec* find_station(const std::string& id) const {
        for (const auto& st : stations)
            if (st.id == id) return &st;
        return nullptr;
    }
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    int line = 0;  // 0 = not tied to a source line (overrides, cross checks)
    std::string message;
};

struct ParseResult {
    std::optional<Scenario> scenario;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return scenario.has_value(); }
    std::vector<Diagnostic> errors() const {
        std::vector<Diagnostic> out;
        for (const auto& d : diagnostics)
            if (d.severity == Diagnostic::Severity::Error) out.push_back(d);
        return out;
    }
};

namespace detail {

struct Entry {
    int line = 0;
    std::string key;  // dotted path, e.g. station.cam.link.ap1.snr_db
    std::string value;
};

// Lowers the sectioned INI form to flat dotted entries.
inline bool tokenize(const std::string& body, std::vector<Entry>& entries,
                     std::vector<Diagnostic>& diags) {
    std::istringstream in(body);
    std::string raw;
    std::string prefix;
    std::set<std::string> seen_sections;
    int line = 0;
    bool ok = true;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view sv = text::trim(raw);
        if (sv.empty() || sv.front() == '#' || sv.front() == ';') continue;
        if (sv.front() == '[') {
            if (sv.back() != ']') {
                diags.push_back({Diagnostic::Severity::Error, line, "unterminated section header"});
                ok = false;
                continue;
            }
            auto inner = text::trim(sv.substr(1, sv.size() - 2));
            auto parts = text::split(inner, ' ');
            parts.erase(std::remove(parts.begin(), parts.end(), std::string{}), parts.end());
            if (parts.size() == 1 && (parts[0] == "sim" || parts[0] == "monitor")) {
                prefix = parts[0];
            } else if (parts.size() == 2 && (parts[0] == "ap" || parts[0] == "station")) {
                prefix = parts[0] + "." + parts[1];
            } else {
                diags.push_back({Diagnostic::Severity::Error, line,
                                 "unknown section '[" + std::string(inner) + "]'"});
                ok = false;
                prefix.clear();
                continue;
            }
            if (!seen_sections.insert(prefix).second) {
                diags.push_back({Diagnostic::Severity::Error, line,
                                 "duplicate section '[" + std::string(inner) + "]'"});
                ok = false;
            }
            continue;
        }
        size_t eq = sv.find('=');
        if (eq == std::string_view::npos) {
            diags.push_back({Diagnostic::Severity::Error, line, "expected 'key = value'"});
            ok = false;
            continue;
        }
        if (prefix.empty()) {
            diags.push_back({Diagnostic::Severity::Error, line, "key outside any section"});
            ok = false;
            continue;
        }
        Entry e;
        e.line = line;
        e.key = prefix + "." + std::string(text::trim(sv.substr(0, eq)));
        e.value = std::string(text::trim(sv.substr(eq + 1)));
        entries.push_back(std::move(e));
    }
    return ok;
}

inline ApSpec* find_ap(std::vector<ApSpec>& aps, const std::string& id) {
    for (auto& ap : aps)
        if (ap.id == id) return &ap;
    return nullptr;
}

inline StationSpec* find_station(std::vector<StationSpec>& stations, const std::string& id) {
    for (auto& st : stations)
        if (st.id == id) return &st;
    return nullptr;
}

}  // namespace detail

// Parses scenario text plus dotted-path overrides (sweep values, CLI flags).
// Unknown keys are errors; every diagnostic carries its source line.
inline ParseResult parse_scenario(const std::string& body,
                                  const std::vector<std::pair<std::string, std::string>>&
                                      overrides = {}) {
    ParseResult result;
    auto& diags = result.diagnostics;
    std::vector<detail::Entry> entries;
    bool ok = detail::tokenize(body, entries, diags);

    bool seed_seen = false;
    for (const auto& [key, value] : overrides) {
        bool replaced = false;
        for (auto& e : entries)
            if (e.key == key) {
                e.value = value;
                replaced = true;
            }
        if (!replaced) entries.push_back({0, key, value});
    }

    Scenario sc;
    auto error = [&](int line, std::string msg) {
        diags.push_back({Diagnostic::Severity::Error, line, std::move(msg)});
        ok = false;
    };
    auto warning = [&](int line, std::string msg) {
        diags.push_back({Diagnostic::Severity::Warning, line, std::move(msg)});
    };
    auto need_double = [&](const detail::Entry& e, double& out) {
        if (!text::parse_double(e.value, out)) {
            error(e.line, "key '" + e.key + "': expected a number, got '" + e.value + "'");
            return false;
        }
        return true;
    };
    auto need_nonneg = [&](const detail::Entry& e, double& out) {
        if (!need_double(e, out)) return false;
        if (out < 0) {
            error(e.line, "key '" + e.key + "': negative value");
            return false;
        }
        return true;
    };
    auto need_int = [&](const detail::Entry& e, int& out) {
        if (!text::parse_int(e.value, out)) {
            error(e.line, "key '" + e.key + "': expected an integer, got '" + e.value + "'");
            return false;
        }
        return true;
    };

    // declaration pass: section ids in file order
    for (const auto& e : entries) {
        auto parts = text::split(e.key, '.');
        if (parts.size() >= 2 && parts[0] == "ap") {
            if (!detail::find_ap(sc.aps, parts[1])) {
                ApSpec ap;
                ap.id = parts[1];
                sc.aps.push_back(std::move(ap));
            }
        } else if (parts.size() >= 2 && parts[0] == "station") {
            if (!detail::find_station(sc.stations, parts[1])) {
                StationSpec st;
                st.id = parts[1];
                sc.stations.push_back(std::move(st));
            }
        }
    }

    for (const auto& e : entries) {
        auto parts = text::split(e.key, '.');
        const std::string& section = parts[0];
        if (section == "sim" && parts.size() == 2) {
            const std::string& k = parts[1];
            if (k == "horizon_s") {
                need_double(e, sc.sim.horizon_s);
            } else if (k == "seed") {
                if (!text::parse_u64(e.value, sc.sim.seed))
                    error(e.line, "key 'sim.seed': expected an unsigned integer");
                else
                    seed_seen = true;
            } else if (k == "alpha") {
                if (need_double(e, sc.sim.alpha)) {
                    if (sc.sim.alpha < 0 || sc.sim.alpha > 1)
                        error(e.line, "key 'sim.alpha': outside [0,1]");
                    else if (sc.sim.alpha < 0.1 || sc.sim.alpha > 0.2)
                        warning(e.line, "sim.alpha outside the recommended [0.1,0.2] range");
                }
            } else if (k == "lba_mode") {
                auto mode = lba_mode_from_string(e.value);
                if (!mode)
                    error(e.line, "key 'sim.lba_mode': expected off|baseline|snr-aware");
                else
                    sc.sim.lba_mode = *mode;
            } else if (k == "handoff_latency_s") {
                need_nonneg(e, sc.sim.handoff_latency_s);
            } else if (k == "queue_capacity") {
                if (need_int(e, sc.sim.queue_capacity) && sc.sim.queue_capacity < 1)
                    error(e.line, "key 'sim.queue_capacity': must be >= 1");
            } else if (k == "max_moves") {
                if (need_int(e, sc.sim.max_moves) && sc.sim.max_moves < 1)
                    error(e.line, "key 'sim.max_moves': must be >= 1");
            } else {
                error(e.line, "unknown key '" + e.key + "'");
            }
        } else if (section == "ap" && parts.size() == 3) {
            ApSpec* ap = detail::find_ap(sc.aps, parts[1]);
            const std::string& k = parts[2];
            if (k == "bandwidth_hz") {
                if (need_double(e, ap->bandwidth_hz) && ap->bandwidth_hz <= 0)
                    error(e.line, "key '" + e.key + "': must be > 0");
            } else if (k == "capacity_cap_bps") {
                double v;
                if (need_double(e, v)) {
                    if (v <= 0)
                        error(e.line, "key '" + e.key + "': must be > 0");
                    else
                        ap->capacity_cap_bps = v;
                }
            } else {
                error(e.line, "unknown key '" + e.key + "'");
            }
        } else if (section == "station" && parts.size() >= 3) {
            StationSpec* st = detail::find_station(sc.stations, parts[1]);
            const std::string& k = parts[2];
            if (k == "link" && parts.size() == 5 && parts[4] == "snr_db") {
                double v;
                if (need_nonneg(e, v)) st->links[parts[3]] = v;
            } else if (parts.size() == 3 && k == "demand_up_kbps") {
                need_nonneg(e, st->demand_up_kbps);
            } else if (parts.size() == 3 && k == "demand_down_kbps") {
                need_nonneg(e, st->demand_down_kbps);
            } else if (parts.size() == 3 && k == "join_time_s") {
                need_nonneg(e, st->join_time_s);
            } else if (parts.size() == 3 && k == "leave_time_s") {
                double v;
                if (need_nonneg(e, v)) st->leave_time_s = v;
            } else if (parts.size() == 3 && k == "profile") {
                if (e.value == "none")
                    st->profile = ProfileKind::None;
                else if (e.value == "video")
                    st->profile = ProfileKind::Video;
                else if (e.value == "ftp")
                    st->profile = ProfileKind::Ftp;
                else if (e.value == "http")
                    st->profile = ProfileKind::Http;
                else
                    error(e.line, "key '" + e.key + "': expected none|video|ftp|http");
            } else if (parts.size() == 4 && k == "video") {
                const std::string& sub = parts[3];
                if (sub == "fps") {
                    if (need_int(e, st->video.fps)) {
                        static const std::set<int> allowed{1, 3, 7, 15, 25};
                        if (!allowed.count(st->video.fps))
                            error(e.line, "key '" + e.key + "': fps must be one of 1,3,7,15,25");
                    }
                } else if (sub == "frame_size_bits") {
                    if (need_double(e, st->video.frame_size_bits) &&
                        st->video.frame_size_bits <= 0)
                        error(e.line, "key '" + e.key + "': must be > 0");
                } else if (sub == "packets_per_frame") {
                    if (need_int(e, st->video.packets_per_frame) &&
                        st->video.packets_per_frame < 1)
                        error(e.line, "key '" + e.key + "': must be >= 1");
                } else {
                    error(e.line, "unknown key '" + e.key + "'");
                }
            } else if (parts.size() == 4 && k == "ftp") {
                const std::string& sub = parts[3];
                double v;
                if (sub == "rate_kbps") {
                    if (need_nonneg(e, v)) st->ftp.rate_kbps = v;
                } else if (sub == "packet_size_bits") {
                    if (need_double(e, st->ftp.packet_size_bits) && st->ftp.packet_size_bits <= 0)
                        error(e.line, "key '" + e.key + "': must be > 0");
                } else {
                    error(e.line, "unknown key '" + e.key + "'");
                }
            } else if (parts.size() == 4 && k == "http") {
                const std::string& sub = parts[3];
                double v;
                if (sub == "rate_kbps") {
                    if (need_nonneg(e, v)) st->http.rate_kbps = v;
                } else if (sub == "mean_on_s") {
                    if (need_double(e, st->http.mean_on_s) && st->http.mean_on_s <= 0)
                        error(e.line, "key '" + e.key + "': must be > 0");
                } else if (sub == "mean_off_s") {
                    if (need_double(e, st->http.mean_off_s) && st->http.mean_off_s <= 0)
                        error(e.line, "key '" + e.key + "': must be > 0");
                } else if (sub == "packet_size_bits") {
                    if (need_double(e, st->http.packet_size_bits) &&
                        st->http.packet_size_bits <= 0)
                        error(e.line, "key '" + e.key + "': must be > 0");
                } else {
                    error(e.line, "unknown key '" + e.key + "'");
                }
            } else {
                error(e.line, "unknown key '" + e.key + "'");
            }
        } else if (section == "monitor" && parts.size() == 2) {
            const std::string& k = parts[1];
            if (k == "flows") {
                sc.monitor.flows = text::split(e.value, ',');
                sc.monitor.flows.erase(
                    std::remove(sc.monitor.flows.begin(), sc.monitor.flows.end(), std::string{}),
                    sc.monitor.flows.end());
            } else if (k == "video_width") {
                if (need_int(e, sc.monitor.video_width) && sc.monitor.video_width < 1)
                    error(e.line, "key '" + e.key + "': must be >= 1");
            } else if (k == "video_height") {
                if (need_int(e, sc.monitor.video_height) && sc.monitor.video_height < 1)
                    error(e.line, "key '" + e.key + "': must be >= 1");
            } else {
                error(e.line, "unknown key '" + e.key + "'");
            }
        } else {
            error(e.line, "unknown key '" + e.key + "'");
        }
    }

    // cross checks
    {
        std::set<std::string> ap_ids, station_ids;
        for (const auto& ap : sc.aps)
            if (!ap_ids.insert(ap.id).second) error(0, "duplicate ap id '" + ap.id + "'");
        for (const auto& st : sc.stations) {
            if (!station_ids.insert(st.id).second)
                error(0, "duplicate station id '" + st.id + "'");
            if (ap_ids.count(st.id))
                error(0, "id '" + st.id + "' used for both an ap and a station");
            for (const auto& [ap, snr] : st.links)
                if (!ap_ids.count(ap))
                    error(0, "station '" + st.id + "' links unknown ap in key 'station." +
                                 st.id + ".link." + ap + ".snr_db'");
            if (st.leave_time_s && *st.leave_time_s <= st.join_time_s)
                error(0, "station '" + st.id + "': leave_time_s must exceed join_time_s");
        }
        for (const auto& flow : sc.monitor.flows)
            if (!station_ids.count(flow))
                error(0, "monitor.flows names unknown station '" + flow + "'");
        if (!seed_seen) error(0, "missing required key 'sim.seed'");
        if (!(sc.sim.horizon_s > 0)) error(0, "sim.horizon_s must be > 0");
        if (sc.aps.empty()) error(0, "scenario declares no access points");
    }

    if (ok) result.scenario = std::move(sc);
    return result;
}

// Canonical text form; parse(render(parse(text))) round-trips.
inline std::string render_scenario(const Scenario& sc) {
    std::ostringstream out;
    using text::format_double;
    out << "[sim]\n";
    out << "horizon_s = " << format_double(sc.sim.horizon_s) << "\n";
    out << "seed = " << sc.sim.seed << "\n";
    out << "alpha = " << format_double(sc.sim.alpha) << "\n";
    out << "lba_mode = " << to_string(sc.sim.lba_mode) << "\n";
    out << "handoff_latency_s = " << format_double(sc.sim.handoff_latency_s) << "\n";
    out << "queue_capacity = " << sc.sim.queue_capacity << "\n";
    out << "max_moves = " << sc.sim.max_moves << "\n";
    for (const auto& ap : sc.aps) {
        out << "\n[ap " << ap.id << "]\n";
        out << "bandwidth_hz = " << format_double(ap.bandwidth_hz) << "\n";
        if (ap.capacity_cap_bps)
            out << "capacity_cap_bps = " << format_double(*ap.capacity_cap_bps) << "\n";
    }
    for (const auto& st : sc.stations) {
        out << "\n[station " << st.id << "]\n";
        for (const auto& [ap, snr] : st.links)
            out << "link." << ap << ".snr_db = " << format_double(snr) << "\n";
        out << "demand_up_kbps = " << format_double(st.demand_up_kbps) << "\n";
        out << "demand_down_kbps = " << format_double(st.demand_down_kbps) << "\n";
        out << "join_time_s = " << format_double(st.join_time_s) << "\n";
        if (st.leave_time_s) out << "leave_time_s = " << format_double(*st.leave_time_s) << "\n";
        switch (st.profile) {
            case ProfileKind::None:
                out << "profile = none\n";
                break;
            case ProfileKind::Video:
                out << "profile = video\n";
                out << "video.fps = " << st.video.fps << "\n";
                out << "video.frame_size_bits = " << format_double(st.video.frame_size_bits)
                    << "\n";
                out << "video.packets_per_frame = " << st.video.packets_per_frame << "\n";
                break;
            case ProfileKind::Ftp:
                out << "profile = ftp\n";
                if (st.ftp.rate_kbps)
                    out << "ftp.rate_kbps = " << format_double(*st.ftp.rate_kbps) << "\n";
                out << "ftp.packet_size_bits = " << format_double(st.ftp.packet_size_bits)
                    << "\n";
                break;
            case ProfileKind::Http:
                out << "profile = http\n";
                if (st.http.rate_kbps)
                    out << "http.rate_kbps = " << format_double(*st.http.rate_kbps) << "\n";
                out << "http.mean_on_s = " << format_double(st.http.mean_on_s) << "\n";
                out << "http.mean_off_s = " << format_double(st.http.mean_off_s) << "\n";
                out << "http.packet_size_bits = " << format_double(st.http.packet_size_bits)
                    << "\n";
                break;
        }
    }
    out << "\n[monitor]\n";
    if (!sc.monitor.flows.empty()) {
        out << "flows = ";
        for (size_t i = 0; i < sc.monitor.flows.size(); ++i) {
            if (i) out << ",";
            out << sc.monitor.flows[i];
        }
        out << "\n";
    }
    out << "video_width = " << sc.monitor.video_width << "\n";
    out << "video_height = " << sc.monitor.video_height << "\n";
    return out.str();
}

}  // namespace wlansim::cli
