#include <CLI11.hpp>

#include "wlansim/run_command.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Deterministic simulator of overlapping 802.11 cells under a "
                 "load-balancing controller"};
    app.require_subcommand(1);

    wlansim::cli::RunOptions opts;
    std::string mode, alpha, seed;

    auto* run = app.add_subcommand("run", "simulate a scenario file and emit CSV reports");
    run->add_option("scenario", opts.scenario_file, "scenario file (.scn)")->required();
    run->add_option("--mode", mode, "override sim.lba_mode (off|baseline|snr-aware)");
    run->add_option("--alpha", alpha, "override the balancing tolerance");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", opts.out_dir, "output directory (default: out)");
    run->add_option("--sweep", opts.sweeps,
                    "key=v1,v2,... re-run per value; repeatable, cartesian");
    run->add_flag("--trace", opts.trace, "also write per-packet trace.csv");

    CLI11_PARSE(app, argc, argv);

    if (!mode.empty()) opts.mode = mode;
    if (!alpha.empty()) {
        double v;
        if (!wlansim::text::parse_double(alpha, v)) {
            std::cerr << "error: --alpha expects a number\n";
            return wlansim::cli::kExitScenarioError;
        }
        opts.alpha = v;
    }
    if (!seed.empty()) {
        uint64_t v;
        if (!wlansim::text::parse_u64(seed, v)) {
            std::cerr << "error: --seed expects an unsigned integer\n";
            return wlansim::cli::kExitScenarioError;
        }
        opts.seed = v;
    }
    return wlansim::cli::run_command(opts);
}
