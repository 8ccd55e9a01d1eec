#pragma once

// Seven-core fiber channel: attenuation, inter-core crosstalk, and the
// Alice-laser / Bob-LO phase process, plus a controllable excess-noise source.

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "cvqkd/alice_tx.hpp"

namespace cvqkd {

inline constexpr int kMcfCores = 7;
inline constexpr double kNoCoupling = std::numeric_limits<double>::infinity();

double db_to_transmittance(double loss_db);
double transmittance_to_db(double t);

struct CoreChannelParams {
    int core_id = 2;
    double transmittance = 1.0;
    // Power coupling from core j+1 into this core, in dB below the source.
    // +inf means uncoupled.
    std::array<double, kMcfCores> crosstalk_db = filled_uncoupled();
    double linewidth_hz = 0.0;      // combined Alice + LO Lorentzian linewidth
    double freq_offset_hz = 0.0;    // residual offset left by the frequency lock
    double excess_noise_at_bob = 0.0;  // SNU, lumped epsilon target

    double loss_db() const { return transmittance_to_db(transmittance); }
    void validate() const;

    static constexpr std::array<double, kMcfCores> filled_uncoupled() {
        std::array<double, kMcfCores> a{};
        for (auto& v : a) v = kNoCoupling;
        return a;
    }
};

// Shipped per-core defaults. Core 1 (7.4 dB) carries the frequency-lock tone
// in the testbed; the remaining values are placeholders that keep the seven-
// core average at 6.3 dB. Core 1 sits at the centre of a hexagonal layout and
// adjacent cores couple at the -50 dB forward bound.
std::array<CoreChannelParams, kMcfCores> default_mcf_cores();

// Square coupling matrix in dB; entry (victim, source). Diagonal must be +inf.
class CrosstalkMatrix {
public:
    explicit CrosstalkMatrix(std::size_t n = 0);

    std::size_t size() const noexcept { return n_; }
    double db(std::size_t victim, std::size_t source) const { return db_.at(victim * n_ + source); }
    void set_db(std::size_t victim, std::size_t source, double value);
    void set_symmetric(std::size_t a, std::size_t b, double value);
    double amplitude_factor(std::size_t victim, std::size_t source) const;
    void validate() const;

private:
    std::size_t n_;
    std::vector<double> db_;
};

struct ChannelState {
    double phase = 0.0;
    std::mt19937_64 rng;

    explicit ChannelState(std::uint64_t seed, double initial_phase = 0.0);
};

PulseFrame apply_attenuation(const PulseFrame& frame, double loss_db);
PulseFrame apply_transmittance(const PulseFrame& frame, double t);

// Adds each source core's field into the victim, scaled by the amplitude
// coupling sqrt(10^(-dB/10)). Energy is added rather than redistributed,
// which bounds the impact from above.
std::vector<PulseFrame> apply_crosstalk(std::span<const PulseFrame> frames, const CrosstalkMatrix& xt);

// Per-pulse Wiener phase variance 2*pi*linewidth*tau.
double phase_step_variance(double linewidth_hz, double symbol_period);

// Rotates pulse k by theta_k, advancing theta by the deterministic offset
// increment plus a Gaussian step every pulse. References and quantum pulses
// share the process. The state carries over between calls.
PulseFrame apply_phase_noise(const PulseFrame& frame, const CoreChannelParams& params, ChannelState& state);

// Per-quadrature noise of variance eps_target / eta at the channel output;
// after the receiver's sqrt(eta/2) scaling this shows up as eps_target in
// the excess-noise estimator.
PulseFrame inject_excess_noise(const PulseFrame& frame, double eps_target, double eta, std::mt19937_64& rng);

}  // namespace cvqkd
