#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wlansim/report.hpp"
#include "wlansim/scenario.hpp"
#include "wlansim/sim.hpp"

namespace wlansim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitScenarioError = 1;
inline constexpr int kExitRuntimeError = 2;

struct RunOptions {
    std::string scenario_file;
    std::optional<std::string> mode;
    std::optional<double> alpha;
    std::optional<uint64_t> seed;
    std::string out_dir = "out";
    std::vector<std::string> sweeps;  // raw "key=v1,v2,..." strings
    bool trace = false;
};

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

inline bool parse_sweep_axis(const std::string& raw, SweepAxis& axis, std::string& error) {
    size_t eq = raw.find('=');
    if (eq == std::string::npos || eq == 0) {
        error = "--sweep expects key=v1,v2,... got '" + raw + "'";
        return false;
    }
    axis.key = std::string(text::trim(raw.substr(0, eq)));
    axis.values = text::split(raw.substr(eq + 1), ',');
    axis.values.erase(std::remove(axis.values.begin(), axis.values.end(), std::string{}),
                      axis.values.end());
    if (axis.values.empty()) {
        error = "--sweep '" + axis.key + "' lists no values";
        return false;
    }
    return true;
}

inline void print_diagnostics(const std::string& file, const std::vector<Diagnostic>& diags,
                              std::ostream& err) {
    for (const auto& d : diags) {
        err << file;
        if (d.line > 0) err << ':' << d.line;
        err << ": "
            << (d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ")
            << d.message << '\n';
    }
}

// Runs one scenario file, optionally fanned out over sweep axes, and writes
// summary.csv / moves.csv (+ trace.csv) into the output directory.
inline int run_command(const RunOptions& opts, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    std::ifstream in(opts.scenario_file, std::ios::binary);
    if (!in) {
        err << "error: cannot open scenario file '" << opts.scenario_file << "'\n";
        return kExitScenarioError;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string body = buffer.str();
    const std::string label = std::filesystem::path(opts.scenario_file).filename().string();

    std::vector<std::pair<std::string, std::string>> base_overrides;
    if (opts.mode) {
        if (!lba_mode_from_string(*opts.mode)) {
            err << "error: --mode expects off|baseline|snr-aware\n";
            return kExitScenarioError;
        }
        base_overrides.emplace_back("sim.lba_mode", *opts.mode);
    }
    if (opts.alpha) base_overrides.emplace_back("sim.alpha", text::format_double(*opts.alpha));
    if (opts.seed) base_overrides.emplace_back("sim.seed", std::to_string(*opts.seed));

    std::vector<SweepAxis> axes;
    for (const auto& raw : opts.sweeps) {
        SweepAxis axis;
        std::string error;
        if (!parse_sweep_axis(raw, axis, error)) {
            err << "error: " << error << '\n';
            return kExitScenarioError;
        }
        axes.push_back(std::move(axis));
    }

    // cartesian product over sweep axes; the last axis varies fastest
    std::vector<std::vector<size_t>> combos;
    {
        std::vector<size_t> idx(axes.size(), 0);
        while (true) {
            combos.push_back(idx);
            size_t pos = axes.size();
            while (pos > 0) {
                --pos;
                if (++idx[pos] < axes[pos].values.size()) break;
                idx[pos] = 0;
                if (pos == 0) {
                    pos = SIZE_MAX;
                    break;
                }
            }
            if (axes.empty() || pos == SIZE_MAX) break;
        }
    }

    std::vector<RunReport> runs;
    for (const auto& combo : combos) {
        auto overrides = base_overrides;
        std::string run_label = label;
        for (size_t i = 0; i < axes.size(); ++i) {
            overrides.emplace_back(axes[i].key, axes[i].values[combo[i]]);
            run_label += '#' + axes[i].key + '=' + axes[i].values[combo[i]];
        }
        auto parsed = parse_scenario(body, overrides);
        print_diagnostics(opts.scenario_file, parsed.diagnostics, err);
        if (!parsed.ok()) return kExitScenarioError;

        RunReport report;
        report.scenario_label = run_label;
        report.seed = parsed.scenario->sim.seed;
        report.mode = parsed.scenario->sim.lba_mode;
        report.alpha = parsed.scenario->sim.alpha;
        report.monitored_flows = parsed.scenario->monitor.flows;
        try {
            report.sim = sim::run(*parsed.scenario);
        } catch (const std::exception& e) {
            err << "error: simulation failed: " << e.what() << '\n';
            return kExitRuntimeError;
        }
        runs.push_back(std::move(report));
    }

    try {
        write_reports(runs, opts.out_dir, opts.trace);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    out << "wrote " << runs.size() << (runs.size() == 1 ? " run to " : " runs to ")
        << opts.out_dir << '\n';
    return kExitOk;
}

}  // namespace wlansim::cli
