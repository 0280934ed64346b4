#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlansim::metrics {

// PSNR of a perfect reconstruction; Eq. 6 diverges for MSE = 0.
inline constexpr double kPsnrCapDb = 100.0;

struct Frame {
    int width = 0;   // columns (M)
    int height = 0;  // rows (N)
    std::vector<uint8_t> samples;  // row-major luma

    uint8_t at(int x, int y) const { return samples[static_cast<size_t>(y) * width + x]; }
};

inline Frame make_frame(int width, int height, uint8_t fill = 0) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("make_frame: non-positive dimensions");
    return Frame{width, height,
                 std::vector<uint8_t>(static_cast<size_t>(width) * height, fill)};
}

inline double mse(const Frame& a, const Frame& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("mse: frame dimensions differ");
    if (a.samples.size() != static_cast<size_t>(a.width) * a.height ||
        b.samples.size() != static_cast<size_t>(b.width) * b.height)
        throw std::invalid_argument("mse: sample count does not match dimensions");
    double sum = 0.0;
    for (size_t i = 0; i < a.samples.size(); ++i) {
        double d = static_cast<double>(a.samples[i]) - static_cast<double>(b.samples[i]);
        sum += d * d;
    }
    return sum / (static_cast<double>(a.width) * a.height);
}

// 20*log10(255/RMSE), capped at 100 dB for identical frames.
inline double psnr(const Frame& a, const Frame& b) {
    double e = mse(a, b);
    if (e == 0.0) return kPsnrCapDb;
    double value = 20.0 * std::log10(255.0 / std::sqrt(e));
    return std::min(value, kPsnrCapDb);
}

// Average per-frame PSNR over a received sequence.
inline double video_psnr(const std::vector<Frame>& reference,
                         const std::vector<Frame>& received) {
    if (reference.size() != received.size())
        throw std::invalid_argument("video_psnr: sequence lengths differ");
    if (reference.empty()) throw std::invalid_argument("video_psnr: empty sequences");
    double sum = 0.0;
    for (size_t i = 0; i < reference.size(); ++i) sum += psnr(reference[i], received[i]);
    return sum / static_cast<double>(reference.size());
}

struct PacketRecord {
    std::string flow_id;
    uint64_t seq = 0;
    double size_bits = 0.0;
    double send_time_s = 0.0;
    std::optional<double> arrival_time_s;  // nullopt = LOST

    bool delivered() const { return arrival_time_s.has_value(); }
};

struct JitterStats {
    double mean_abs_jitter_ms = 0.0;
    double jitter_range_ms = 0.0;  // max - min of signed jitter
};

// jitter_i = (a_{i+1} - a_i) - (s_{i+1} - s_i) over consecutive delivered
// records; a loss merges two gaps into one rather than leaving a hole.
inline JitterStats jitter_stats(const std::vector<PacketRecord>& records) {
    std::vector<const PacketRecord*> delivered;
    for (const auto& r : records)
        if (r.delivered()) delivered.push_back(&r);
    std::sort(delivered.begin(), delivered.end(),
              [](const PacketRecord* a, const PacketRecord* b) { return a->seq < b->seq; });
    if (delivered.size() < 3)
        throw std::invalid_argument("jitter_stats: fewer than 3 delivered records");

    JitterStats stats;
    double min_j = 0.0, max_j = 0.0, abs_sum = 0.0;
    size_t gaps = delivered.size() - 1;
    for (size_t i = 0; i + 1 < delivered.size(); ++i) {
        double j = (*delivered[i + 1]->arrival_time_s - *delivered[i]->arrival_time_s) -
                   (delivered[i + 1]->send_time_s - delivered[i]->send_time_s);
        if (i == 0) {
            min_j = max_j = j;
        } else {
            min_j = std::min(min_j, j);
            max_j = std::max(max_j, j);
        }
        abs_sum += std::abs(j);
    }
    stats.mean_abs_jitter_ms = abs_sum / static_cast<double>(gaps) * 1000.0;
    stats.jitter_range_ms = (max_j - min_j) * 1000.0;
    return stats;
}

// Delivered bits in [window_start, window_end) over the window length, in kbps.
inline double bitrate(const std::vector<PacketRecord>& records, double window_start_s,
                      double window_end_s) {
    if (!(window_end_s > window_start_s))
        throw std::invalid_argument("bitrate: window_end must exceed window_start");
    double bits = 0.0;
    for (const auto& r : records)
        if (r.delivered() && *r.arrival_time_s >= window_start_s &&
            *r.arrival_time_s < window_end_s)
            bits += r.size_bits;
    return bits / ((window_end_s - window_start_s) * 1000.0);
}

inline double mean_delay_ms(const std::vector<PacketRecord>& records) {
    double sum = 0.0;
    size_t n = 0;
    for (const auto& r : records)
        if (r.delivered()) {
            sum += *r.arrival_time_s - r.send_time_s;
            ++n;
        }
    if (n == 0) throw std::invalid_argument("mean_delay: no delivered records");
    return sum / static_cast<double>(n) * 1000.0;
}

inline double loss_fraction(const std::vector<PacketRecord>& records) {
    if (records.empty()) return 0.0;
    size_t lost = 0;
    for (const auto& r : records)
        if (!r.delivered()) ++lost;
    return static_cast<double>(lost) / static_cast<double>(records.size());
}

struct QosReport {
    double bitrate_kbps = 0.0;
    double mean_delay_ms = 0.0;
    double mean_abs_jitter_ms = 0.0;
    double jitter_range_ms = 0.0;
    std::optional<double> video_psnr_db;
    double loss_fraction = 0.0;
};

}  // namespace wlansim::metrics
