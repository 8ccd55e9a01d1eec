// Command-line runner: loads a scenario config, runs it, and writes the
// per-block CSV, summary JSON, calibration JSON or figure tables.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdint>
#include <optional>
#include <string>

#include "cvqkd/report_io.hpp"
#include "cvqkd/scenario.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

struct Args {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> fidelity;
    std::optional<unsigned> workers;
    std::string which = "all";
};

void add_common(CLI::App& cmd, Args& args) {
    cmd.add_option("--config", args.config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    cmd.add_option("--seed", args.seed, "Override the config seed");
    cmd.add_option("--out", args.out, "Override the output directory");
    cmd.add_option("--fidelity", args.fidelity, "Simulation fidelity")
        ->check(CLI::IsMember({"symbol", "waveform"}));
    cmd.add_option("--workers", args.workers, "Worker threads (0: all cores)");
}

cvqkd::ScenarioConfig load(const Args& args, cvqkd::RunMode mode) {
    auto cfg = cvqkd::load_scenario_config(args.config, mode);
    if (cfg.mode != mode)
        cvqkd::fail(cvqkd::ErrorKind::mode, fmt::format("config mode '{}' does not match subcommand mode '{}'",
                                                        cvqkd::to_string(cfg.mode), cvqkd::to_string(mode)));
    if (args.seed) cfg.seed = *args.seed;
    if (args.out) cfg.output_dir = *args.out;
    if (args.fidelity) cfg.fidelity = *args.fidelity == "waveform" ? cvqkd::Fidelity::waveform : cvqkd::Fidelity::symbol;
    if (args.workers) cfg.workers = *args.workers;
    cfg.validate();
    return cfg;
}

void print_summary(const cvqkd::RunReport& report) {
    for (const auto& s : report.per_core_summary)
        fmt::print("core {}: blocks {}/{}  eps {:.4f} SNU  T {:.4f}  I_AB {:.4f}  chi_BE {:.4f}  SKR {:.4f} Mb/s\n",
                   s.core_id, s.blocks_ok, s.blocks_ok + s.blocks_failed, s.eps, s.t_hat, s.i_ab, s.chi_be,
                   s.skr / 1e6);
    fmt::print("aggregate SKR {:.4f} Mb/s\n", report.aggregate_skr / 1e6);
    for (const auto& f : report.failures)
        fmt::print(stderr, "core {} block {}: {}: {}\n", f.core_id, f.block_index, cvqkd::to_string(f.kind),
                   f.message);
}

int finish(const cvqkd::RunReport& report) {
    if (report.all_blocks_failed()) {
        fmt::print(stderr, "error: every block failed\n");
        return kRuntimeError;
    }
    return kOk;
}

int run_simulate(const Args& args, cvqkd::RunMode mode) {
    const auto cfg = load(args, mode);
    const auto report = cvqkd::run_scenario(cfg);
    for (const auto& p : cvqkd::write_run_outputs(report, cfg.output_dir)) fmt::print("wrote {}\n", p.string());
    print_summary(report);
    return finish(report);
}

int run_calibrate(const Args& args) {
    const auto cfg = load(args, cvqkd::RunMode::calibrate);
    const auto report = cvqkd::run_scenario(cfg);
    for (const auto& p : cvqkd::write_run_outputs(report, cfg.output_dir)) fmt::print("wrote {}\n", p.string());
    for (const auto& c : report.calibrations)
        fmt::print("core {}: v_elec {:.5f} SNU  clearance {:.2f} dB\n", c.core_id, c.record.v_elec_snu,
                   c.record.clearance_db);
    return report.calibrations.empty() && !report.failures.empty() ? kRuntimeError : kOk;
}

int run_figures(const Args& args) {
    const auto cfg = cvqkd::load_scenario_config(args.config, cvqkd::RunMode::simulate);
    if (cfg.mode != cvqkd::RunMode::simulate)
        cvqkd::fail(cvqkd::ErrorKind::mode,
                    fmt::format("figure data needs a simulate config, got '{}'", cvqkd::to_string(cfg.mode)));
    const auto resolved = load(args, cvqkd::RunMode::simulate);
    const auto report = cvqkd::run_scenario(resolved);
    std::vector<cvqkd::FigureKind> kinds;
    if (args.which == "all")
        kinds = {cvqkd::FigureKind::fig3, cvqkd::FigureKind::fig4, cvqkd::FigureKind::fig5};
    else
        kinds = {cvqkd::parse_figure_kind(args.which)};
    for (auto kind : kinds)
        for (const auto& p : cvqkd::emit_figure_data(report, kind, resolved.output_dir))
            fmt::print("wrote {}\n", p.string());
    return finish(report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GMCS CV-QKD over multicore fiber: simulator and key-rate calculator", "mcfqkd"};
    app.set_version_flag("--version", std::string(cvqkd::library_version()));
    app.require_subcommand(1);

    Args args;
    auto* simulate = app.add_subcommand("simulate", "Run the end-to-end simulation");
    auto* keyrate = app.add_subcommand("keyrate", "Evaluate key rates from configured (T, eps)");
    auto* calibrate = app.add_subcommand("calibrate", "Run the shot/electronic noise calibration");
    auto* figures = app.add_subcommand("figures", "Simulate and write plot-ready figure tables");
    for (auto* cmd : {simulate, keyrate, calibrate, figures}) add_common(*cmd, args);
    figures->add_option("--which", args.which, "Figure to emit")->check(CLI::IsMember({"fig3", "fig4", "fig5", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*simulate) return run_simulate(args, cvqkd::RunMode::simulate);
        if (*keyrate) return run_simulate(args, cvqkd::RunMode::keyrate_only);
        if (*calibrate) return run_calibrate(args);
        return run_figures(args);
    } catch (const cvqkd::Error& e) {
        fmt::print(stderr, "error: {}: {}\n", cvqkd::to_string(e.kind()), e.what());
        const bool user_error = e.kind() == cvqkd::ErrorKind::config || e.kind() == cvqkd::ErrorKind::mode;
        return user_error ? kConfigError : kRuntimeError;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kRuntimeError;
    }
}
