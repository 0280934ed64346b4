#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlansim/channel.hpp"
#include "wlansim/lba.hpp"
#include "wlansim/metrics.hpp"
#include "wlansim/scenario.hpp"
#include "wlansim/topology.hpp"

namespace wlansim::sim {

// Deterministic sequence of distinct frames so that freeze-frame
// concealment is visible to PSNR: sample(x,y,i) = (x + y + 7*i) mod 256.
// The pattern itself is fixed; pattern_seed is part of the interface for
// scenario plumbing and does not alter the ramp.
inline std::vector<metrics::Frame> generate_frames(uint64_t pattern_seed, int count, int width,
                                                   int height) {
    (void)pattern_seed;
    if (count < 1) throw std::invalid_argument("generate_frames: count must be >= 1");
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("generate_frames: zero or negative dimensions");
    std::vector<metrics::Frame> frames;
    frames.reserve(count);
    for (int i = 0; i < count; ++i) {
        metrics::Frame f = metrics::make_frame(width, height);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                f.samples[static_cast<size_t>(y) * width + x] =
                    static_cast<uint8_t>((x + y + 7 * i) % 256);
        frames.push_back(std::move(f));
    }
    return frames;
}

// Freeze-frame concealment: a lost frame repeats the last delivered one;
// losses before the first delivery show mid-gray.
inline std::vector<metrics::Frame> conceal(const std::vector<metrics::Frame>& reference,
                                           const std::vector<bool>& delivered) {
    if (reference.size() != delivered.size())
        throw std::invalid_argument("conceal: flag count must match frame count");
    std::vector<metrics::Frame> received;
    received.reserve(reference.size());
    const metrics::Frame* last = nullptr;
    for (size_t i = 0; i < reference.size(); ++i) {
        if (delivered[i]) {
            last = &reference[i];
            received.push_back(reference[i]);
        } else if (last != nullptr) {
            received.push_back(*last);
        } else {
            received.push_back(
                metrics::make_frame(reference[i].width, reference[i].height, 128));
        }
    }
    return received;
}

enum class EventKind {
    PacketArrivalAtAp,
    PacketDeparture,
    StationJoin,
    StationLeave,
    DemandChange,
    LbaRun,
    MoveCommand,
    FrameDeadline,
};

struct Packet {
    std::string flow_id;
    uint64_t seq = 0;
    double size_bits = 0.0;
    double send_time_s = 0.0;
    int frame_index = -1;       // -1 for non-video traffic
    double extra_delay_s = 0.0; // handoff penalty carried by migrated packets
};

struct Event {
    double time_s = 0.0;
    uint64_t seq = 0;  // insertion order; FIFO among equal timestamps
    EventKind kind = EventKind::LbaRun;
    std::string station;
    Packet packet;
    std::string ap;                       // PacketDeparture
    std::string from_ap, to_ap;           // MoveCommand
    double snr_from_db = 0, snr_to_db = 0;
    double demand_up_kbps = 0, demand_down_kbps = 0;  // DemandChange
    int frame_index = -1;                 // FrameDeadline
};

struct ApQueue {
    std::string ap_id;
    std::deque<Packet> buffer;  // waiting packets, FIFO
    std::optional<Packet> in_service;
    int capacity_packets = 100;
    uint64_t drops = 0;
};

struct TrafficSource {
    std::string flow_id;
    cli::ProfileKind profile = cli::ProfileKind::None;
    cli::VideoProfile video;
    cli::FtpProfile ftp;
    cli::HttpProfile http;
};

struct AssocMessage {
    enum class Kind { AssocRequest, AssocAccept, AssocReject, MoveCommand, LoadReport };
    Kind kind = Kind::AssocRequest;
    double time_s = 0.0;
    std::string station;
    std::string ap_from, ap_to;
    double value = 0.0;  // required_bw for requests, T_i for load reports
};

struct MoveLogEntry {
    double time_s = 0.0;
    lba::Move move;
};

struct FlowStats {
    metrics::QosReport qos;
    uint64_t generated = 0;
    uint64_t delivered = 0;
    uint64_t dropped = 0;
    uint64_t queued_at_horizon = 0;
    uint64_t frames_sent = 0;
    uint64_t frames_delivered = 0;
    std::string ap_path;  // e.g. "ap1>ap2"
    bool monitored = false;
};

struct SimReport {
    std::map<std::string, FlowStats> flows;
    std::vector<MoveLogEntry> moves;
    lba::LoadClassification final_classification;
    std::vector<AssocMessage> messages;
    std::map<std::string, std::vector<metrics::PacketRecord>> traces;
    uint64_t joins = 0, rejects = 0, lba_runs = 0;
    uint64_t move_commands_applied = 0, stale_move_commands = 0, load_reports = 0;
};

namespace detail {

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// xorshift-mixed uniform in [0,1); keeps HTTP on/off sampling independent
// of library distribution internals.
struct SeededExp {
    uint64_t state;
    explicit SeededExp(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    double uniform() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }
};

}  // namespace detail

class Engine {
  public:
    explicit Engine(const cli::Scenario& scenario) : scenario_(scenario) {
        validate_scenario();
        for (const auto& ap : scenario_.aps) {
            aps_.push_back(AccessPoint{ap.id, ap.bandwidth_hz, ap.capacity_cap_bps});
            queues_[ap.id] = ApQueue{ap.id, {}, std::nullopt, scenario_.sim.queue_capacity, 0};
        }
        for (const auto& st : scenario_.stations) {
            StationState s;
            s.spec = &st;
            s.demand_up_kbps = st.demand_up_kbps;
            s.demand_down_kbps = st.demand_down_kbps;
            stations_[st.id] = std::move(s);
            if (st.join_time_s < scenario_.sim.horizon_s) {
                Event ev;
                ev.time_s = st.join_time_s;
                ev.kind = EventKind::StationJoin;
                ev.station = st.id;
                schedule(ev);
            }
            if (st.leave_time_s && *st.leave_time_s <= scenario_.sim.horizon_s) {
                Event ev;
                ev.time_s = *st.leave_time_s;
                ev.kind = EventKind::StationLeave;
                ev.station = st.id;
                schedule(ev);
            }
        }
    }

    // External injection point for tests and for triggers the scenario
    // format does not express (demand changes, forced LBA runs).
    void inject(Event ev) { schedule(std::move(ev)); }

    SimReport run() {
        const double horizon = scenario_.sim.horizon_s;
        while (!queue_.empty() && queue_.top().time_s <= horizon) {
            Event ev = queue_.top();
            queue_.pop();
            now_ = ev.time_s;
            dispatch(ev);
        }
        return finalize();
    }

  private:
    struct StationState {
        const cli::StationSpec* spec = nullptr;
        std::optional<std::string> ap;
        bool active = false;
        double demand_up_kbps = 0, demand_down_kbps = 0;
        std::vector<std::string> ap_path;
    };

    enum class PacketStatus { InQueue, Delivered, Dropped };

    struct FlowData {
        std::vector<metrics::PacketRecord> records;  // index == packet seq
        std::vector<PacketStatus> status;
        // per-frame bookkeeping, video flows only
        std::vector<double> frame_send_s;
        std::vector<double> frame_deadline_s;
        std::vector<int> frame_total_packets;
        std::vector<int> frame_evaluated;  // 0 pending, 1 delivered, 2 lost
    };

    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time_s != b.time_s) return a.time_s > b.time_s;
            return a.seq > b.seq;
        }
    };

    void validate_scenario() {
        if (!(scenario_.sim.horizon_s > 0))
            throw std::invalid_argument("scenario: horizon_s must be > 0");
        NetworkState net;
        for (const auto& ap : scenario_.aps)
            net.aps.push_back(AccessPoint{ap.id, ap.bandwidth_hz, ap.capacity_cap_bps});
        for (const auto& st : scenario_.stations)
            net.stations.push_back(MobileStation{st.id, st.links, std::nullopt,
                                                 st.demand_up_kbps, st.demand_down_kbps});
        auto violations = validate(net);
        if (!violations.empty())
            throw std::invalid_argument("scenario: " + violations.front());
        for (const auto& flow : scenario_.monitor.flows)
            if (!scenario_.find_station(flow))
                throw std::invalid_argument("scenario: monitored flow '" + flow +
                                            "' names no station");
    }

    void schedule(Event ev) {
        ev.seq = next_event_seq_++;
        queue_.push(std::move(ev));
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EventKind::StationJoin: on_station_join(ev); break;
            case EventKind::StationLeave: on_station_leave(ev); break;
            case EventKind::DemandChange: on_demand_change(ev); break;
            case EventKind::LbaRun: on_lba_run(); break;
            case EventKind::MoveCommand: on_move_command(ev); break;
            case EventKind::PacketArrivalAtAp: on_packet_arrival(ev); break;
            case EventKind::PacketDeparture: on_packet_departure(ev); break;
            case EventKind::FrameDeadline: on_frame_deadline(ev); break;
        }
    }

    NetworkState snapshot() const {
        NetworkState net;
        net.aps = aps_;
        for (const auto& [id, st] : stations_) {
            if (!st.active) continue;
            net.stations.push_back(MobileStation{id, st.spec->links, st.ap, st.demand_up_kbps,
                                                 st.demand_down_kbps});
        }
        net.zones = derive_zones(net);
        return net;
    }

    double link_capacity_bps(const std::string& station_id, const std::string& ap_id) const {
        const auto& st = stations_.at(station_id);
        const AccessPoint* ap = nullptr;
        for (const auto& a : aps_)
            if (a.id == ap_id) ap = &a;
        auto it = st.spec->links.find(ap_id);
        if (ap == nullptr || it == st.spec->links.end()) return 0.0;
        return channel::link_budget(*ap, it->second).capacity_bps;
    }

    void log_message(AssocMessage::Kind kind, const std::string& station,
                     const std::string& from, const std::string& to, double value) {
        messages_.push_back(AssocMessage{kind, now_, station, from, to, value});
    }

    // New station asks for a connection: it targets the reachable AP with
    // the best SNR; the request is accepted whenever any AP is reachable,
    // and the controller is only invoked when the join pushes that AP
    // beyond delta1.
    void on_station_join(const Event& ev) {
        auto& st = stations_.at(ev.station);
        log_message(AssocMessage::Kind::AssocRequest, ev.station, "", "",
                    st.demand_up_kbps + st.demand_down_kbps);
        const std::string* best = nullptr;
        double best_snr = -1.0;
        for (const auto& [ap, snr] : st.spec->links) {
            if (snr > best_snr || (snr == best_snr && best && ap < *best)) {
                best = &ap;
                best_snr = snr;
            }
        }
        if (best == nullptr) {
            ++rejects_;
            log_message(AssocMessage::Kind::AssocReject, ev.station, "", "", 0.0);
            return;
        }
        st.active = true;
        st.ap = *best;
        st.ap_path.push_back(*best);
        ++joins_;
        log_message(AssocMessage::Kind::AssocAccept, ev.station, "", *best, 0.0);
        start_source(ev.station);

        auto net = snapshot();
        auto cls = lba::classify_network(net, scenario_.sim.alpha);
        if (ap_load(net, *best) > cls.delta1_kbps) schedule_lba_run();
    }

    void on_station_leave(const Event& ev) {
        auto& st = stations_.at(ev.station);
        if (!st.active) return;
        if (st.ap) {
            auto& q = queues_.at(*st.ap);
            std::deque<Packet> keep;
            for (auto& p : q.buffer) {
                if (p.flow_id == ev.station) {
                    mark_dropped(p);
                    ++q.drops;
                } else {
                    keep.push_back(std::move(p));
                }
            }
            q.buffer = std::move(keep);
        }
        st.active = false;
        st.ap.reset();
        schedule_lba_run();  // BSS membership changed
    }

    void on_demand_change(const Event& ev) {
        auto& st = stations_.at(ev.station);
        st.demand_up_kbps = ev.demand_up_kbps;
        st.demand_down_kbps = ev.demand_down_kbps;
        if (st.active) schedule_lba_run();
    }

    void schedule_lba_run() {
        if (scenario_.sim.lba_mode == cli::LbaMode::Off) return;
        Event ev;
        ev.time_s = now_;
        ev.kind = EventKind::LbaRun;
        schedule(ev);
    }

    // Controller pass: every AP files a load report, the balancing
    // procedure runs on a snapshot and each planned move is issued as a
    // MoveCommand taking effect one handoff latency later.
    void on_lba_run() {
        if (scenario_.sim.lba_mode == cli::LbaMode::Off) return;
        ++lba_runs_;
        auto net = snapshot();
        auto loads = all_ap_loads(net);
        for (const auto& [ap, load] : loads) {
            log_message(AssocMessage::Kind::LoadReport, "", ap, "", load);
            ++load_reports_;
        }
        lba::BalanceParams params;
        params.alpha = scenario_.sim.alpha;
        params.max_moves = scenario_.sim.max_moves;
        params.mode = scenario_.sim.lba_mode == cli::LbaMode::SnrAware ? lba::Mode::SnrAware
                                                                       : lba::Mode::Baseline;
        auto plan = lba::rebalance(net, params);
        for (const auto& move : plan.moves) {
            log_message(AssocMessage::Kind::MoveCommand, move.station_id, move.from_ap,
                        move.to_ap, 0.0);
            Event ev;
            ev.time_s = now_ + scenario_.sim.handoff_latency_s;
            ev.kind = EventKind::MoveCommand;
            ev.station = move.station_id;
            ev.from_ap = move.from_ap;
            ev.to_ap = move.to_ap;
            ev.snr_from_db = move.snr_from_db;
            ev.snr_to_db = move.snr_to_db;
            schedule(ev);
        }
    }

    void on_move_command(const Event& ev) {
        auto& st = stations_.at(ev.station);
        if (!st.active || !st.ap || *st.ap != ev.from_ap) {
            ++stale_move_commands_;  // state changed between decision and application
            return;
        }
        auto& from_q = queues_.at(ev.from_ap);
        auto& to_q = queues_.at(ev.to_ap);

        std::deque<Packet> keep;
        std::vector<Packet> migrated;
        for (auto& p : from_q.buffer) {
            if (p.flow_id == ev.station)
                migrated.push_back(std::move(p));
            else
                keep.push_back(std::move(p));
        }
        from_q.buffer = std::move(keep);
        for (auto& p : migrated) {
            p.extra_delay_s += scenario_.sim.handoff_latency_s;
            if (static_cast<int>(to_q.buffer.size()) >= to_q.capacity_packets) {
                mark_dropped(p);
                ++to_q.drops;
            } else {
                to_q.buffer.push_back(std::move(p));
            }
        }
        st.ap = ev.to_ap;
        st.ap_path.push_back(ev.to_ap);
        ++move_commands_applied_;
        moves_.push_back(MoveLogEntry{
            now_, lba::Move{ev.station, ev.from_ap, ev.to_ap, ev.snr_from_db, ev.snr_to_db}});
        maybe_start_service(to_q);
    }

    void on_packet_arrival(const Event& ev) {
        const auto& st = stations_.at(ev.packet.flow_id);
        if (!st.active || !st.ap) return;  // source stopped before this send
        auto& flow = flow_data_[ev.packet.flow_id];
        record_generated(flow, ev.packet);
        auto& q = queues_.at(*st.ap);
        if (static_cast<int>(q.buffer.size()) >= q.capacity_packets) {
            mark_dropped(ev.packet);
            ++q.drops;
            return;
        }
        q.buffer.push_back(ev.packet);
        maybe_start_service(q);
    }

    void maybe_start_service(ApQueue& q) {
        if (q.in_service || q.buffer.empty()) return;
        Packet p = std::move(q.buffer.front());
        q.buffer.pop_front();
        const auto& st = stations_.at(p.flow_id);
        double rate = st.ap ? link_capacity_bps(p.flow_id, q.ap_id) : 0.0;
        double service = channel::packet_service_time(p.size_bits, rate);
        if (!std::isfinite(service)) {
            // starved link: park the packet at the queue head until rates change
            q.buffer.push_front(std::move(p));
            return;
        }
        Event ev;
        ev.time_s = now_ + service;
        ev.kind = EventKind::PacketDeparture;
        ev.ap = q.ap_id;
        q.in_service = std::move(p);
        schedule(ev);
    }

    void on_packet_departure(const Event& ev) {
        auto& q = queues_.at(ev.ap);
        if (!q.in_service) return;
        Packet p = std::move(*q.in_service);
        q.in_service.reset();
        mark_delivered(p, now_ + p.extra_delay_s);
        maybe_start_service(q);
    }

    void on_frame_deadline(const Event& ev) {
        auto& flow = flow_data_[ev.station];
        int fi = ev.frame_index;
        if (fi < 0 || fi >= static_cast<int>(flow.frame_evaluated.size())) return;
        const auto& spec = stations_.at(ev.station).spec->video;
        uint64_t first = static_cast<uint64_t>(fi) * spec.packets_per_frame;
        bool all_in = true;
        for (int k = 0; k < spec.packets_per_frame; ++k) {
            uint64_t s = first + k;
            if (s >= flow.records.size() || !flow.records[s].arrival_time_s ||
                !(*flow.records[s].arrival_time_s < flow.frame_deadline_s[fi])) {
                all_in = false;
                break;
            }
        }
        flow.frame_evaluated[fi] = all_in ? 1 : 2;
    }

    void record_generated(FlowData& flow, const Packet& p) {
        if (flow.records.size() <= p.seq) {
            flow.records.resize(p.seq + 1);
            flow.status.resize(p.seq + 1, PacketStatus::InQueue);
        }
        metrics::PacketRecord r;
        r.flow_id = p.flow_id;
        r.seq = p.seq;
        r.size_bits = p.size_bits;
        r.send_time_s = p.send_time_s;
        flow.records[p.seq] = std::move(r);
        flow.status[p.seq] = PacketStatus::InQueue;
    }

    void mark_delivered(const Packet& p, double arrival_s) {
        auto& flow = flow_data_.at(p.flow_id);
        flow.records[p.seq].arrival_time_s = arrival_s;
        flow.status[p.seq] = PacketStatus::Delivered;
    }

    void mark_dropped(const Packet& p) {
        auto& flow = flow_data_.at(p.flow_id);
        flow.status[p.seq] = PacketStatus::Dropped;
    }

    // Emits the whole send schedule for one station's source; runs when the
    // station's join is accepted.
    void start_source(const std::string& station_id) {
        const auto& st = stations_.at(station_id);
        const auto& spec = *st.spec;
        double start = now_;
        double end = scenario_.sim.horizon_s;
        if (spec.leave_time_s) end = std::min(end, *spec.leave_time_s);
        uint64_t seq = 0;
        auto& flow = flow_data_[station_id];

        auto emit = [&](double t, double bits, int frame_index) {
            Event ev;
            ev.time_s = t;
            ev.kind = EventKind::PacketArrivalAtAp;
            ev.packet = Packet{station_id, seq++, bits, t, frame_index, 0.0};
            schedule(ev);
        };

        switch (spec.profile) {
            case cli::ProfileKind::None:
                break;
            case cli::ProfileKind::Video: {
                const auto& v = spec.video;
                double period = 1.0 / v.fps;
                double packet_bits = v.frame_size_bits / v.packets_per_frame;
                for (int frame = 0;; ++frame) {
                    double t = start + frame * period;
                    if (!(t < end)) break;
                    for (int k = 0; k < v.packets_per_frame; ++k) emit(t, packet_bits, frame);
                    flow.frame_send_s.push_back(t);
                    flow.frame_deadline_s.push_back(t + period);
                    flow.frame_total_packets.push_back(v.packets_per_frame);
                    flow.frame_evaluated.push_back(0);
                    Event dl;
                    dl.time_s = t + period;
                    dl.kind = EventKind::FrameDeadline;
                    dl.station = station_id;
                    dl.frame_index = frame;
                    schedule(dl);
                }
                break;
            }
            case cli::ProfileKind::Ftp: {
                double rate_kbps = spec.ftp.rate_kbps.value_or(spec.demand_up_kbps +
                                                               spec.demand_down_kbps);
                if (rate_kbps <= 0) break;
                double interval = spec.ftp.packet_size_bits / (rate_kbps * 1000.0);
                for (uint64_t i = 0;; ++i) {
                    double t = start + i * interval;
                    if (!(t < end)) break;
                    emit(t, spec.ftp.packet_size_bits, -1);
                }
                break;
            }
            case cli::ProfileKind::Http: {
                double rate_kbps = spec.http.rate_kbps.value_or(spec.demand_up_kbps +
                                                                spec.demand_down_kbps);
                if (rate_kbps <= 0) break;
                double interval = spec.http.packet_size_bits / (rate_kbps * 1000.0);
                detail::SeededExp rng(scenario_.sim.seed ^ detail::fnv1a64(station_id));
                double t = start;
                bool on = true;
                while (t < end) {
                    double duration =
                        rng.exponential(on ? spec.http.mean_on_s : spec.http.mean_off_s);
                    double segment_end = std::min(t + duration, end);
                    if (on)
                        for (double ts = t; ts < segment_end; ts += interval)
                            emit(ts, spec.http.packet_size_bits, -1);
                    t += duration;
                    on = !on;
                }
                break;
            }
        }
    }

    metrics::QosReport flow_qos(const std::string& flow_id, const FlowData& flow) const {
        metrics::QosReport qos;
        const auto& records = flow.records;
        qos.bitrate_kbps = records.empty()
                               ? 0.0
                               : metrics::bitrate(records, 0.0, scenario_.sim.horizon_s);
        qos.loss_fraction = metrics::loss_fraction(records);
        bool any_delivered = false;
        for (const auto& r : records) any_delivered |= r.delivered();
        qos.mean_delay_ms = any_delivered ? metrics::mean_delay_ms(records) : 0.0;

        std::vector<metrics::PacketRecord> jitter_records;
        const auto& spec = *stations_.at(flow_id).spec;
        if (spec.profile == cli::ProfileKind::Video) {
            jitter_records = frame_records(flow_id, flow);
        } else {
            jitter_records = records;
        }
        size_t delivered = 0;
        for (const auto& r : jitter_records) delivered += r.delivered() ? 1 : 0;
        if (delivered >= 3) {
            auto js = metrics::jitter_stats(jitter_records);
            qos.mean_abs_jitter_ms = js.mean_abs_jitter_ms;
            qos.jitter_range_ms = js.jitter_range_ms;
        }

        if (spec.profile == cli::ProfileKind::Video) {
            size_t scored = 0;
            while (scored < flow.frame_evaluated.size() && flow.frame_evaluated[scored] != 0)
                ++scored;
            if (scored >= 1) {
                auto reference =
                    generate_frames(scenario_.sim.seed, static_cast<int>(scored),
                                    scenario_.monitor.video_width,
                                    scenario_.monitor.video_height);
                std::vector<bool> delivered_flags(scored);
                for (size_t i = 0; i < scored; ++i)
                    delivered_flags[i] = flow.frame_evaluated[i] == 1;
                qos.video_psnr_db =
                    metrics::video_psnr(reference, conceal(reference, delivered_flags));
            }
        }
        return qos;
    }

    // One record per video frame: send = frame emission, arrival = last
    // packet of the frame when it met its deadline, LOST otherwise.
    std::vector<metrics::PacketRecord> frame_records(const std::string& flow_id,
                                                     const FlowData& flow) const {
        std::vector<metrics::PacketRecord> out;
        const auto& spec = stations_.at(flow_id).spec->video;
        for (size_t fi = 0; fi < flow.frame_evaluated.size(); ++fi) {
            metrics::PacketRecord r;
            r.flow_id = flow_id;
            r.seq = fi;
            r.size_bits = spec.frame_size_bits;
            r.send_time_s = flow.frame_send_s[fi];
            if (flow.frame_evaluated[fi] == 1) {
                double last = 0.0;
                uint64_t first = fi * spec.packets_per_frame;
                for (int k = 0; k < spec.packets_per_frame; ++k)
                    last = std::max(last, *flow.records[first + k].arrival_time_s);
                r.arrival_time_s = last;
            }
            out.push_back(std::move(r));
        }
        return out;
    }

    SimReport finalize() {
        SimReport report;
        report.moves = moves_;
        report.messages = messages_;
        report.joins = joins_;
        report.rejects = rejects_;
        report.lba_runs = lba_runs_;
        report.move_commands_applied = move_commands_applied_;
        report.stale_move_commands = stale_move_commands_;
        report.load_reports = load_reports_;
        {
            auto net = snapshot();
            if (!net.aps.empty())
                report.final_classification = lba::classify_network(net, scenario_.sim.alpha);
        }
        for (const auto& flow_id : scenario_.monitor.flows) flow_data_[flow_id];
        for (const auto& [flow_id, flow] : flow_data_) {
            FlowStats stats;
            stats.generated = flow.records.size();
            for (auto s : flow.status) {
                if (s == PacketStatus::Delivered) ++stats.delivered;
                if (s == PacketStatus::Dropped) ++stats.dropped;
                if (s == PacketStatus::InQueue) ++stats.queued_at_horizon;
            }
            stats.frames_sent = flow.frame_evaluated.size();
            for (auto e : flow.frame_evaluated) stats.frames_delivered += e == 1 ? 1 : 0;
            const auto& st = stations_.at(flow_id);
            for (size_t i = 0; i < st.ap_path.size(); ++i) {
                if (i) stats.ap_path += '>';
                stats.ap_path += st.ap_path[i];
            }
            stats.monitored =
                std::find(scenario_.monitor.flows.begin(), scenario_.monitor.flows.end(),
                          flow_id) != scenario_.monitor.flows.end();
            stats.qos = flow_qos(flow_id, flow);
            report.traces[flow_id] = flow.records;
            report.flows[flow_id] = std::move(stats);
        }
        return report;
    }

    cli::Scenario scenario_;
    std::vector<AccessPoint> aps_;
    std::map<std::string, StationState> stations_;
    std::map<std::string, ApQueue> queues_;
    std::map<std::string, FlowData> flow_data_;
    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    std::vector<MoveLogEntry> moves_;
    std::vector<AssocMessage> messages_;
    uint64_t next_event_seq_ = 0;
    double now_ = 0.0;
    uint64_t joins_ = 0, rejects_ = 0, lba_runs_ = 0;
    uint64_t move_commands_applied_ = 0, stale_move_commands_ = 0, load_reports_ = 0;
};

inline SimReport run(const cli::Scenario& scenario) { return Engine(scenario).run(); }

}  // namespace wlansim::sim
