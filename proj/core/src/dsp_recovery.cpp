#include "cvqkd/dsp_recovery.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

namespace cvqkd {

PeakDetection detect_peaks(std::span<const QuadratureSymbol> waveform, std::size_t period_samples,
                           double low_power_threshold) {
    if (period_samples < 2) fail(ErrorKind::domain, "period must span at least two samples");
    if (waveform.size() < period_samples) fail(ErrorKind::empty_output, "waveform shorter than one pulse period");

    const std::size_t n = waveform.size() / period_samples;
    PeakDetection out;
    out.symbols.reserve(n);
    out.low_power.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto window = waveform.subspan(k * period_samples, period_samples);
        const auto peak = std::max_element(window.begin(), window.end(),
                                           [](const auto& a, const auto& b) { return a.norm2() < b.norm2(); });
        const bool low = peak->norm2() <= low_power_threshold;
        out.symbols.push_back(*peak);
        out.low_power.push_back(low);
        out.low_power_count += low ? 1 : 0;
    }
    return out;
}

Deinterleaved deinterleave(std::span<const QuadratureSymbol> pulses) {
    Deinterleaved out;
    out.refs.reserve(pulses.size() / 2 + 1);
    out.quantum.reserve(pulses.size() / 2);
    for (std::size_t i = 0; i < pulses.size(); ++i) (i % 2 == 0 ? out.refs : out.quantum).push_back(pulses[i]);
    return out;
}

double ref_phase(QuadratureSymbol ref) {
    if (ref.norm2() == 0.0 || !ref.finite()) fail(ErrorKind::degenerate_reference, "reference has zero amplitude");
    return std::atan2(ref.p, ref.x);
}

double circular_midpoint(double a, double b) {
    const double sx = std::cos(a) + std::cos(b);
    const double sy = std::sin(a) + std::sin(b);
    if (std::hypot(sx, sy) < 1e-12) {
        // Antipodal pair: both arcs are equally short; take the one reached
        // counter-clockwise from a.
        return std::remainder(a + std::remainder(b - a, two_pi) / 2.0, two_pi);
    }
    return std::atan2(sy, sx);
}

namespace {

std::vector<double> reference_phases(std::span<const QuadratureSymbol> refs, std::size_t window) {
    std::vector<double> phases(refs.size());
    if (window <= 1) {
        for (std::size_t i = 0; i < refs.size(); ++i) phases[i] = ref_phase(refs[i]);
        return phases;
    }
    // Average unit phasors so amplitude fluctuations do not weight the mean.
    std::vector<QuadratureSymbol> unit(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const double m = refs[i].magnitude();
        if (m == 0.0) fail(ErrorKind::degenerate_reference, "reference has zero amplitude");
        unit[i] = refs[i].scaled(1.0 / m);
    }
    const std::size_t half = window / 2;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(refs.size(), lo + window);
        QuadratureSymbol acc{};
        for (std::size_t j = lo; j < hi; ++j) acc = acc + unit[j];
        phases[i] = ref_phase(acc);
    }
    return phases;
}

}  // namespace

RecoveredBlock recover_phase(std::span<const QuadratureSymbol> quantum, std::span<const QuadratureSymbol> refs,
                             const RecoveryOptions& options) {
    RecoveredBlock block;
    const std::size_t usable = refs.empty() ? 0 : std::min(quantum.size(), refs.size() - 1);
    block.dropped = quantum.size() - usable;

    const auto phases = reference_phases(refs, options.smoothing_window);

    block.quantum_rx.reserve(usable);
    block.phase_track.reserve(usable);
    for (std::size_t i = 0; i < usable; ++i) {
        const double correction = circular_midpoint(phases[i], phases[i + 1]) - options.tx_reference_phase;
        block.phase_track.push_back(correction);
        block.quantum_rx.push_back(quantum[i].rotated(-correction));
    }

    block.refs_rx.reserve(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        double estimate = phases[i];
        if (refs.size() > 1) {
            if (i == 0) estimate = phases[1];
            else if (i + 1 == refs.size()) estimate = phases[i - 1];
            else estimate = circular_midpoint(phases[i - 1], phases[i + 1]);
        }
        block.refs_rx.push_back(refs[i].rotated(-(estimate - options.tx_reference_phase)));
    }
    return block;
}

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* ptr;
};

struct FftwRealBuffer {
    explicit FftwRealBuffer(std::size_t n) : ptr(fftw_alloc_real(n)) { std::fill(ptr, ptr + n, 0.0); }
    ~FftwRealBuffer() { fftw_free(ptr); }
    FftwRealBuffer(const FftwRealBuffer&) = delete;
    FftwRealBuffer& operator=(const FftwRealBuffer&) = delete;
    double* ptr;
};

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

std::vector<double> cross_correlation(std::span<const double> tx, std::span<const double> rx) {
    if (tx.empty() || rx.empty()) fail(ErrorKind::shape, "cross-correlation of an empty series");

    const std::size_t out_len = tx.size() + rx.size() - 1;
    const std::size_t n = next_pow2(out_len);
    const std::size_t nc = n / 2 + 1;

    FftwRealBuffer a(n), b(n), c(n);
    FftwBuffer fa(nc), fb(nc);
    // Reversed tx turns correlation into convolution: conv[k] pairs
    // tx[i] with rx[k - (len(tx) - 1) + i].
    for (std::size_t i = 0; i < tx.size(); ++i) a.ptr[i] = tx[tx.size() - 1 - i];
    std::copy(rx.begin(), rx.end(), b.ptr);

    fftw_plan pa, pb, pc;
    {
        std::lock_guard lock(fftw_planner_mutex());
        pa = fftw_plan_dft_r2c_1d(static_cast<int>(n), a.ptr, fa.ptr, FFTW_ESTIMATE);
        pb = fftw_plan_dft_r2c_1d(static_cast<int>(n), b.ptr, fb.ptr, FFTW_ESTIMATE);
        pc = fftw_plan_dft_c2r_1d(static_cast<int>(n), fa.ptr, c.ptr, FFTW_ESTIMATE);
    }
    fftw_execute(pa);
    fftw_execute(pb);
    for (std::size_t k = 0; k < nc; ++k) {
        const std::complex<double> x(fa.ptr[k][0], fa.ptr[k][1]);
        const std::complex<double> y(fb.ptr[k][0], fb.ptr[k][1]);
        const auto z = x * y;
        fa.ptr[k][0] = z.real();
        fa.ptr[k][1] = z.imag();
    }
    fftw_execute(pc);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pc);
    }

    std::vector<double> out(c.ptr, c.ptr + out_len);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= inv_n;
    return out;
}

std::ptrdiff_t sync_offset(std::span<const QuadratureSymbol> tx, std::span<const QuadratureSymbol> rx,
                           double min_peak_to_median) {
    if (tx.empty() || rx.empty()) fail(ErrorKind::sync_failure, "cannot synchronize an empty series");

    std::vector<double> tx_x(tx.size()), rx_x(rx.size());
    std::transform(tx.begin(), tx.end(), tx_x.begin(), [](const auto& s) { return s.x; });
    std::transform(rx.begin(), rx.end(), rx_x.begin(), [](const auto& s) { return s.x; });

    const auto corr = cross_correlation(tx_x, rx_x);
    const auto peak = std::max_element(corr.begin(), corr.end());

    std::vector<double> mags(corr.size());
    std::transform(corr.begin(), corr.end(), mags.begin(), [](double v) { return std::abs(v); });
    auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    const double median = *mid;

    if (!(*peak > 0.0) || *peak < min_peak_to_median * median)
        fail(ErrorKind::sync_failure, "no significant cross-correlation peak");

    return static_cast<std::ptrdiff_t>(peak - corr.begin()) - static_cast<std::ptrdiff_t>(tx.size() - 1);
}

}  // namespace cvqkd
