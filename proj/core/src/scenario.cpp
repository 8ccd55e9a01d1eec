#include "cvqkd/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "cvqkd/bob_rx.hpp"
#include "cvqkd/dsp_recovery.hpp"

#ifndef CVQKD_VERSION
#define CVQKD_VERSION "0.0.0"
#endif

namespace cvqkd {

std::string_view library_version() noexcept { return CVQKD_VERSION; }

bool RunReport::all_blocks_failed() const noexcept {
    return per_block.empty() && !failures.empty();
}

namespace {

// Stream tags keep every random stage of a (core, block) independent.
enum Stage : std::uint64_t {
    kDelay = 1,
    kAlice = 2,
    kPhase = 3,
    kExcess = 4,
    kReceiver = 5,
    kWaveform = 6,
};

std::uint64_t stage_seed(std::uint64_t seed, int core_id, std::size_t block, Stage stage) {
    auto eng = seeded_engine(seed, {static_cast<std::uint64_t>(core_id), block, stage});
    return eng();
}

// Runs task(i) for i in [0, n) on at most `workers` threads. The first
// non-library exception is rethrown on the caller's thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& task) {
    if (n == 0) return;
    unsigned hw = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    hw = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (hw <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(hw);
        for (unsigned w = 0; w < hw; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

// Waveform fidelity: render each chunk of pulses as a sampled trace, add
// per-sample noise, and take the power peak of each pulse window back out.
SymbolSeries waveform_round_trip(const SymbolSeries& pulses, const SimulationOptions& opts, std::uint64_t seed) {
    constexpr std::size_t chunk = 4096;
    auto rng = seeded_engine(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(opts.waveform_sample_noise_var));

    SymbolSeries out;
    out.reserve(pulses.size());
    for (std::size_t start = 0; start < pulses.size(); start += chunk) {
        const std::size_t len = std::min(chunk, pulses.size() - start);
        auto trace = render_waveform(std::span(pulses).subspan(start, len), opts.waveform);
        if (opts.waveform_sample_noise_var > 0.0)
            for (auto& s : trace) s = s + QuadratureSymbol{noise(rng), noise(rng)};
        auto peaks = detect_peaks(trace, opts.waveform.period_samples);
        out.insert(out.end(), peaks.symbols.begin(), peaks.symbols.end());
    }
    return out;
}

Histogram x_histogram(std::span<const QuadratureSymbol> alice, std::span<const QuadratureSymbol> bob,
                      std::size_t bins, double half_width) {
    Histogram h;
    h.lo = -half_width;
    h.hi = half_width;
    h.alice.assign(bins, 0);
    h.bob.assign(bins, 0);
    const double width = (h.hi - h.lo) / static_cast<double>(bins);
    auto fill = [&](std::span<const QuadratureSymbol> series, std::vector<std::size_t>& counts) {
        for (const auto& s : series) {
            if (s.x < h.lo || s.x >= h.hi) continue;
            const auto k = std::min(bins - 1, static_cast<std::size_t>((s.x - h.lo) / width));
            ++counts[k];
        }
    };
    fill(alice, h.alice);
    fill(bob, h.bob);
    return h;
}

double x_variance(std::span<const QuadratureSymbol> series) {
    std::vector<double> xs(series.size());
    std::transform(series.begin(), series.end(), xs.begin(), [](const auto& s) { return s.x; });
    return sample_variance(xs);
}

struct CoreOutcome {
    std::optional<BlockRow> row;
    std::optional<BlockFailure> failure;
    std::optional<FigureData> figure;
};

// One block across all configured cores. Cores share the trigger delay and
// are coupled through crosstalk before their independent receive chains.
std::vector<CoreOutcome> simulate_block(const ScenarioConfig& cfg, std::size_t block) {
    const std::size_t n_cores = cfg.cores.size();
    const std::size_t n = cfg.block_size;
    const auto& sys = cfg.system;
    const auto& opts = cfg.simulation;

    auto delay_rng = seeded_engine(cfg.seed, {block, kDelay});
    const std::size_t delay = std::uniform_int_distribution<std::size_t>(0, opts.max_sync_delay)(delay_rng);
    // Pre-trigger symbols, the block, and one trailing symbol so the last
    // block symbol has a closing reference.
    const std::size_t n_total = delay + n + 1;

    std::vector<GmcsSequence> sequences;
    std::vector<PulseFrame> frames;
    sequences.reserve(n_cores);
    frames.reserve(n_cores);
    for (const auto& core : cfg.cores) {
        sequences.push_back(gen_gmcs_symbols(n_total, sys.v_mod, stage_seed(cfg.seed, core.core_id, block, kAlice),
                                             opts.repeat_period));
        auto frame = build_frame(sequences.back(), sys.rho, opts.reference_phase, sys.pulse_rate);
        frames.push_back(apply_transmittance(frame, core.transmittance));
    }
    if (n_cores > 1) frames = apply_crosstalk(frames, cfg.crosstalk());

    std::vector<CoreOutcome> outcomes(n_cores);
    for (std::size_t c = 0; c < n_cores; ++c) {
        const auto& core = cfg.cores[c];
        auto& outcome = outcomes[c];
        try {
            const auto phase_seed = stage_seed(cfg.seed, core.core_id, block, kPhase);
            auto phase_rng = seeded_engine(phase_seed);
            ChannelState state(phase_seed, std::uniform_real_distribution<double>(-pi, pi)(phase_rng));
            auto frame = apply_phase_noise(frames[c], core, state);
            auto excess_rng = seeded_engine(stage_seed(cfg.seed, core.core_id, block, kExcess));
            frame = inject_excess_noise(frame, core.excess_noise_at_bob, sys.eta, excess_rng);

            ReceiverModel rx;
            rx.eta = sys.eta;
            rx.v_elec = sys.v_elec;
            rx.seed = stage_seed(cfg.seed, core.core_id, block, kReceiver);
            rx.raw_gain = cfg.receiver.raw_gain;
            const auto cal = calibrate(rx, cfg.receiver.calibration_samples);

            auto raw = heterodyne_measure_raw(frame, rx);
            if (cfg.fidelity == Fidelity::waveform)
                raw = waveform_round_trip(raw, opts, stage_seed(cfg.seed, core.core_id, block, kWaveform));
            const auto snu = snu_normalize(raw, cal);
            const auto split = deinterleave(snu);

            RecoveryOptions ro;
            ro.tx_reference_phase = opts.reference_phase;
            ro.smoothing_window = opts.phase_smoothing;
            auto rec = recover_phase(split.quantum, split.refs, ro);

            const auto tx_block = std::span<const QuadratureSymbol>(sequences[c].symbols).subspan(delay, n);
            const auto offset = sync_offset(tx_block, rec.quantum_rx);
            if (offset < 0 || static_cast<std::size_t>(offset) + n > rec.quantum_rx.size())
                fail(ErrorKind::sync_failure, "synchronization lag leaves an incomplete block");
            rec.sync_offset = offset;
            const auto bob = std::span<const QuadratureSymbol>(rec.quantum_rx).subspan(offset, n);

            BlockRow row;
            row.core_id = core.core_id;
            row.block_index = block;
            row.sync_offset = offset;
            row.calibration = cal;
            row.estimate = estimate_block(tx_block, bob, sys, cal.v_elec_snu, core.core_id);

            SystemParams measured = sys;
            measured.v_elec = cal.v_elec_snu;
            row.key = secret_key_rate_from_estimates(measured, row.estimate.t_hat, row.estimate.eps,
                                                     {cfg.receiver.trust, HolevoMethod::closed_form});
            outcome.row = row;

            if (block == 0) {
                FigureData fig;
                fig.core_id = core.core_id;
                const std::size_t pre = std::min(opts.figure_points, snu.size());
                fig.pre_recovery.assign(snu.begin(), snu.begin() + static_cast<std::ptrdiff_t>(pre));
                for (std::size_t i = 0; i < pre; ++i)
                    fig.pre_kinds.push_back(i % 2 == 0 ? PulseKind::reference : PulseKind::quantum);
                const std::size_t half = opts.figure_points / 2;
                fig.post_refs.assign(rec.refs_rx.begin(),
                                     rec.refs_rx.begin() + static_cast<std::ptrdiff_t>(std::min(half, rec.refs_rx.size())));
                fig.post_quantum.assign(bob.begin(), bob.begin() + static_cast<std::ptrdiff_t>(std::min(half, bob.size())));
                const std::size_t first = std::min<std::size_t>(40, n);
                fig.alice_first.assign(tx_block.begin(), tx_block.begin() + static_cast<std::ptrdiff_t>(first));
                fig.bob_first.assign(bob.begin(), bob.begin() + static_cast<std::ptrdiff_t>(first));
                fig.alice_x_variance = x_variance(tx_block);
                fig.bob_x_variance = x_variance(bob);
                const double half_width = 5.0 * std::sqrt(std::max(fig.alice_x_variance, fig.bob_x_variance));
                fig.x_histogram = x_histogram(tx_block, bob, opts.histogram_bins, half_width);
                outcome.figure = std::move(fig);
            }
        } catch (const Error& e) {
            outcome.failure = BlockFailure{core.core_id, block, e.kind(), e.what()};
        }
    }
    return outcomes;
}

void summarize(RunReport& report, const ScenarioConfig& cfg) {
    std::vector<KeyRateResult> means;
    for (const auto& core : cfg.cores) {
        CoreSummary s;
        s.core_id = core.core_id;
        std::vector<double> t_values;
        for (const auto& row : report.per_block) {
            if (row.core_id != core.core_id) continue;
            ++s.blocks_ok;
            s.eps += row.estimate.eps;
            s.t_hat += row.estimate.t_hat;
            s.i_ab += row.estimate.i_ab;
            s.chi_be += row.key.chi_be;
            s.skr += row.key.skr;
            s.skr_raw += row.key.skr_raw;
            s.v_b += row.estimate.v_b;
            t_values.push_back(row.estimate.t_hat);
        }
        for (const auto& f : report.failures)
            if (f.core_id == core.core_id) ++s.blocks_failed;
        if (s.blocks_ok > 0) {
            const double k = static_cast<double>(s.blocks_ok);
            s.eps /= k;
            s.t_hat /= k;
            s.i_ab /= k;
            s.chi_be /= k;
            s.skr /= k;
            s.skr_raw /= k;
            s.v_b /= k;
        }
        if (t_values.size() >= 2 && s.t_hat > 0.0) s.t_hat_rel_std = std::sqrt(sample_variance(t_values)) / s.t_hat;
        report.per_core_summary.push_back(s);

        KeyRateResult mean;
        mean.skr = s.skr;
        means.push_back(mean);
    }
    report.aggregate_skr = aggregate_skr(means);
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config) {
    config.validate();

    RunReport report;
    report.mode = config.mode;
    report.config_echo = config;
    report.version = std::string(library_version());

    switch (config.mode) {
    case RunMode::keyrate_only: {
        for (const auto& core : config.cores) {
            try {
                BlockRow row;
                row.core_id = core.core_id;
                row.block_index = 0;
                row.estimate.core_id = core.core_id;
                row.estimate.t_hat = core.transmittance;
                row.estimate.eps = core.excess_noise_at_bob;
                row.estimate.v_b = predicted_bob_variance(config.system, core.transmittance, core.excess_noise_at_bob);
                row.key = secret_key_rate(config.system, core.transmittance, core.excess_noise_at_bob,
                                          {config.receiver.trust, HolevoMethod::closed_form});
                row.estimate.i_ab = row.key.i_ab;
                report.per_block.push_back(row);
            } catch (const Error& e) {
                report.failures.push_back({core.core_id, 0, e.kind(), e.what()});
            }
        }
        break;
    }
    case RunMode::calibrate: {
        for (const auto& core : config.cores) {
            ReceiverModel rx;
            rx.eta = config.system.eta;
            rx.v_elec = config.system.v_elec;
            rx.seed = stage_seed(config.seed, core.core_id, 0, kReceiver);
            rx.raw_gain = config.receiver.raw_gain;
            try {
                report.calibrations.push_back({core.core_id, calibrate(rx, config.receiver.calibration_samples)});
            } catch (const Error& e) {
                report.failures.push_back({core.core_id, 0, e.kind(), e.what()});
            }
        }
        return report;
    }
    case RunMode::simulate: {
        std::vector<std::vector<CoreOutcome>> blocks(config.n_blocks);
        parallel_for(config.n_blocks, config.workers,
                     [&](std::size_t b) { blocks[b] = simulate_block(config, b); });
        // Deterministic (core, block) ordering regardless of completion order.
        for (std::size_t c = 0; c < config.cores.size(); ++c) {
            for (std::size_t b = 0; b < config.n_blocks; ++b) {
                auto& o = blocks[b][c];
                if (o.row) report.per_block.push_back(*o.row);
                if (o.failure) report.failures.push_back(*o.failure);
                if (o.figure) report.figures.push_back(std::move(*o.figure));
            }
        }
        break;
    }
    }

    std::stable_sort(report.per_block.begin(), report.per_block.end(), [](const auto& a, const auto& b) {
        return std::tie(a.core_id, a.block_index) < std::tie(b.core_id, b.block_index);
    });
    summarize(report, config);
    return report;
}

}  // namespace cvqkd
