#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wlansim/scenario.hpp"
#include "wlansim/sim.hpp"
#include "wlansim/text.hpp"

namespace wlansim::cli {

struct RunReport {
    std::string scenario_label;  // file name, '#key=value' suffixed for sweep runs
    uint64_t seed = 0;
    LbaMode mode = LbaMode::Off;
    double alpha = 0.2;
    std::vector<std::string> monitored_flows;
    sim::SimReport sim;
};

inline std::string summary_csv(const std::vector<RunReport>& runs) {
    std::ostringstream out;
    out << "scenario,seed,mode,alpha,flow,ap_path,bitrate_kbps,mean_delay_ms,"
           "mean_abs_jitter_ms,jitter_range_ms,psnr_db,loss_fraction\n";
    for (const auto& run : runs) {
        for (const auto& flow : run.monitored_flows) {
            auto it = run.sim.flows.find(flow);
            if (it == run.sim.flows.end()) continue;
            const auto& stats = it->second;
            out << run.scenario_label << ',' << run.seed << ',' << to_string(run.mode) << ','
                << text::format_double(run.alpha) << ',' << flow << ',' << stats.ap_path << ','
                << text::format_double(stats.qos.bitrate_kbps) << ','
                << text::format_double(stats.qos.mean_delay_ms) << ','
                << text::format_double(stats.qos.mean_abs_jitter_ms) << ','
                << text::format_double(stats.qos.jitter_range_ms) << ',';
            if (stats.qos.video_psnr_db) out << text::format_double(*stats.qos.video_psnr_db);
            out << ',' << text::format_double(stats.qos.loss_fraction) << '\n';
        }
    }
    return out.str();
}

inline std::string moves_csv(const std::vector<RunReport>& runs) {
    std::ostringstream out;
    out << "time_s,station,from_ap,to_ap,snr_from_db,snr_to_db\n";
    for (const auto& run : runs)
        for (const auto& entry : run.sim.moves)
            out << text::format_double(entry.time_s) << ',' << entry.move.station_id << ','
                << entry.move.from_ap << ',' << entry.move.to_ap << ','
                << text::format_double(entry.move.snr_from_db) << ','
                << text::format_double(entry.move.snr_to_db) << '\n';
    return out.str();
}

inline std::string trace_csv(const std::vector<RunReport>& runs) {
    std::ostringstream out;
    out << "flow,seq,size_bits,send_time_s,arrival_time_s\n";
    for (const auto& run : runs)
        for (const auto& [flow, records] : run.sim.traces)
            for (const auto& r : records) {
                out << flow << ',' << r.seq << ',' << text::format_double(r.size_bits) << ','
                    << text::format_double(r.send_time_s) << ',';
                if (r.arrival_time_s)
                    out << text::format_double(*r.arrival_time_s);
                else
                    out << "LOST";
                out << '\n';
            }
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << body;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// summary.csv + moves.csv always; trace.csv on request.
inline void write_reports(const std::vector<RunReport>& runs,
                          const std::filesystem::path& out_dir, bool include_trace = false) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "summary.csv", summary_csv(runs));
    write_file(out_dir / "moves.csv", moves_csv(runs));
    if (include_trace) write_file(out_dir / "trace.csv", trace_csv(runs));
}

}  // namespace wlansim::cli
