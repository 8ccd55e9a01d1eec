#pragma once

// Shared domain types. All quadrature values are in shot-noise units (SNU):
// a vacuum state has variance 1 in each quadrature, so a coherent state with
// amplitude (x, p) carries (x^2 + p^2) / 4 photons on average.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cvqkd/error.hpp"

namespace cvqkd {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

struct QuadratureSymbol {
    double x = 0.0;
    double p = 0.0;

    double norm2() const noexcept { return x * x + p * p; }
    double magnitude() const noexcept { return std::hypot(x, p); }
    double photon_number() const noexcept { return norm2() / 4.0; }
    bool finite() const noexcept { return std::isfinite(x) && std::isfinite(p); }

    // Counter-clockwise rotation of the phasor x + i p.
    QuadratureSymbol rotated(double phi) const noexcept {
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        return {c * x - s * p, s * x + c * p};
    }

    QuadratureSymbol scaled(double k) const noexcept { return {k * x, k * p}; }

    friend QuadratureSymbol operator+(QuadratureSymbol a, QuadratureSymbol b) noexcept {
        return {a.x + b.x, a.p + b.p};
    }
    friend QuadratureSymbol operator-(QuadratureSymbol a, QuadratureSymbol b) noexcept {
        return {a.x - b.x, a.p - b.p};
    }
    friend bool operator==(QuadratureSymbol, QuadratureSymbol) = default;
};

using SymbolSeries = std::vector<QuadratureSymbol>;

// Transmission parameters; defaults are the operating point of the
// 15 km seven-core link.
struct SystemParams {
    double v_mod = 1.764;        // SNU, per-quadrature modulation variance
    double eta = 0.18;           // detection efficiency
    double v_elec = 0.021;       // SNU, electronic noise per measured quadrature
    double beta = 0.95;          // reconciliation efficiency
    double rho = 300.0;          // reference / quantum intensity ratio
    double pulse_rate = 31.25e6; // Hz

    // One reference per quantum pulse.
    double r_eff() const noexcept { return pulse_rate / 2.0; }
    double symbol_period() const noexcept { return 1.0 / pulse_rate; }
    double mean_photon_number() const noexcept { return v_mod / 2.0; }

    static SystemParams from_mean_photon_number(double n_mean);
    static SystemParams from_mean_photon_number(double n_mean, SystemParams base);

    void validate() const;
};

// Shot-noise and electronic-noise acquisitions in raw (oscilloscope) units.
// shot_var_raw is measured with the LO on and the signal blocked, so it still
// contains the electronic contribution.
struct CalibrationRecord {
    double shot_var_raw = 1.0;
    double elec_var_raw = 0.0;
    double snu_scale = 1.0;   // sqrt(shot - elec): divide raw amplitudes by this
    double v_elec_snu = 0.0;
    double clearance_db = 0.0;

    static CalibrationRecord from_raw(double shot_var_raw, double elec_var_raw);

    bool infinite_clearance() const noexcept { return std::isinf(clearance_db); }
};

SymbolSeries snu_normalize(std::span<const QuadratureSymbol> samples, const CalibrationRecord& cal);

// nullopt when the electronic noise is exactly zero (infinite clearance).
std::optional<double> clearance(const CalibrationRecord& cal);

// Pooled sample statistics over both quadratures, treating X and P as one
// population of 2N real values.
std::vector<double> pooled(std::span<const QuadratureSymbol> series);
double mean_photon_number(std::span<const QuadratureSymbol> series);
double sample_variance(std::span<const double> values);
double sample_mean(std::span<const double> values);

// Deterministic engine derived from a user seed plus a stream path
// (core, block, stage, ...), so independent stages never share draws.
std::mt19937_64 seeded_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

}  // namespace cvqkd
