#pragma once

// Scenario-driven orchestration: config -> per-core, per-block pipeline ->
// report. File I/O lives in report_io.hpp.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cvqkd/alice_tx.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/mcf_channel.hpp"
#include "cvqkd/model.hpp"

namespace cvqkd {

std::string_view library_version() noexcept;

enum class RunMode { simulate, keyrate_only, calibrate };
enum class Fidelity { symbol, waveform };

std::string_view to_string(RunMode mode) noexcept;
std::string_view to_string(Fidelity fidelity) noexcept;

struct ReceiverOptions {
    double raw_gain = 1.0;
    std::size_t calibration_samples = 100'000;
    ReceiverTrust trust = ReceiverTrust::trusted;
};

struct SimulationOptions {
    std::size_t max_sync_delay = 256;  // symbols of pre-trigger before each block
    std::size_t repeat_period = 0;     // 0: non-repeating modulation stream
    std::size_t phase_smoothing = 1;   // reference moving-average window
    double reference_phase = 0.0;      // rad
    WaveformShape waveform;
    double waveform_sample_noise_var = 0.0;  // SNU per sample and quadrature
    std::size_t figure_points = 20'000;
    std::size_t histogram_bins = 60;
};

struct ScenarioConfig {
    RunMode mode = RunMode::simulate;
    std::vector<CoreChannelParams> cores;
    SystemParams system;
    ReceiverOptions receiver;
    SimulationOptions simulation;
    std::size_t block_size = 1'000'000;
    std::size_t n_blocks = 30;
    std::uint64_t seed = 1;
    Fidelity fidelity = Fidelity::symbol;
    std::string output_dir = "out";
    unsigned workers = 0;  // 0: hardware concurrency

    // Throws Error(config) naming the offending field.
    void validate() const;
    CrosstalkMatrix crosstalk() const;
};

// A missing "mode" key takes `default_mode`.
ScenarioConfig parse_scenario_config(std::string_view json_text, RunMode default_mode = RunMode::simulate);
ScenarioConfig load_scenario_config(const std::filesystem::path& path, RunMode default_mode = RunMode::simulate);
std::string scenario_config_to_json(const ScenarioConfig& config);

struct BlockRow {
    int core_id = 0;
    std::size_t block_index = 0;
    BlockEstimate estimate;
    KeyRateResult key;
    std::ptrdiff_t sync_offset = 0;
    CalibrationRecord calibration;
};

struct BlockFailure {
    int core_id = 0;
    std::size_t block_index = 0;
    ErrorKind kind = ErrorKind::domain;
    std::string message;
};

struct CoreSummary {
    int core_id = 0;
    std::size_t blocks_ok = 0;
    std::size_t blocks_failed = 0;
    double eps = 0.0;
    double t_hat = 0.0;
    double i_ab = 0.0;
    double chi_be = 0.0;
    double skr = 0.0;
    double skr_raw = 0.0;
    double v_b = 0.0;
    double t_hat_rel_std = 0.0;  // sample std / mean over blocks
};

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> alice;
    std::vector<std::size_t> bob;
};

// Plot-ready samples from the first block of each core.
struct FigureData {
    int core_id = 0;
    std::vector<PulseKind> pre_kinds;
    SymbolSeries pre_recovery;       // de-normalized pulses before recovery
    SymbolSeries post_refs;
    SymbolSeries post_quantum;
    SymbolSeries alice_first;        // first 40 aligned symbols
    SymbolSeries bob_first;
    Histogram x_histogram;
    double alice_x_variance = 0.0;
    double bob_x_variance = 0.0;
};

struct CoreCalibration {
    int core_id = 0;
    CalibrationRecord record;
};

struct RunReport {
    RunMode mode = RunMode::simulate;
    std::vector<BlockRow> per_block;  // sorted by (core_id, block_index)
    std::vector<BlockFailure> failures;
    std::vector<CoreSummary> per_core_summary;
    double aggregate_skr = 0.0;
    ScenarioConfig config_echo;
    std::string version;
    std::vector<FigureData> figures;
    std::vector<CoreCalibration> calibrations;

    bool all_blocks_failed() const noexcept;
};

RunReport run_scenario(const ScenarioConfig& config);

}  // namespace cvqkd
