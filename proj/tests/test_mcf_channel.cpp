#include <gtest/gtest.h>

#include <cmath>

#include "cvqkd/mcf_channel.hpp"

using namespace cvqkd;

namespace {

PulseFrame test_frame(std::size_t n, std::uint64_t seed = 1) {
    return build_frame(gen_gmcs_symbols(n, 1.764, seed), 300.0);
}

}  // namespace

TEST(McfChannel, DecibelConversions) {
    EXPECT_NEAR(db_to_transmittance(3.0), 0.501187, 1e-6);
    EXPECT_NEAR(transmittance_to_db(0.5), 3.0103, 1e-4);
    EXPECT_NEAR(transmittance_to_db(db_to_transmittance(6.3)), 6.3, 1e-12);
    EXPECT_THROW(db_to_transmittance(-1.0), Error);
    EXPECT_THROW(transmittance_to_db(0.0), Error);
}

TEST(McfChannel, AttenuationIsAdditiveInDecibels) {
    const auto frame = test_frame(200);
    for (double a : {0.0, 1.5, 6.1}) {
        for (double b : {0.3, 2.0, 7.4}) {
            const auto two_step = apply_attenuation(apply_attenuation(frame, a), b);
            const auto one_step = apply_attenuation(frame, a + b);
            for (std::size_t i = 0; i < frame.size(); ++i) {
                EXPECT_NEAR(two_step.pulses[i].symbol.x, one_step.pulses[i].symbol.x, 1e-12);
                EXPECT_NEAR(two_step.pulses[i].symbol.p, one_step.pulses[i].symbol.p, 1e-12);
            }
        }
    }
}

TEST(McfChannel, TransmittanceScalesPower) {
    const auto frame = test_frame(100);
    const auto out = apply_transmittance(frame, 0.25);
    for (std::size_t i = 0; i < frame.size(); ++i)
        EXPECT_NEAR(out.pulses[i].symbol.norm2(), 0.25 * frame.pulses[i].symbol.norm2(), 1e-12);
    EXPECT_THROW(apply_transmittance(frame, 1.5), Error);
}

TEST(McfChannel, DefaultSevenCoreLayout) {
    const auto cores = default_mcf_cores();
    EXPECT_NEAR(cores[0].loss_db(), 7.4, 1e-12);
    EXPECT_NEAR(cores[1].loss_db(), 6.1, 1e-12);
    for (const auto& c : cores) {
        EXPECT_NO_THROW(c.validate());
        EXPECT_TRUE(std::isinf(c.crosstalk_db[static_cast<std::size_t>(c.core_id - 1)]));
    }
    // The centre core neighbours every outer core.
    for (std::size_t k = 1; k < kMcfCores; ++k) EXPECT_TRUE(std::isfinite(cores[0].crosstalk_db[k]));
}

TEST(McfChannel, CrosstalkMatrixValidation) {
    CrosstalkMatrix xt(3);
    EXPECT_NO_THROW(xt.validate());
    xt.set_symmetric(0, 1, 40.0);
    EXPECT_NO_THROW(xt.validate());
    EXPECT_NEAR(xt.amplitude_factor(0, 1), std::sqrt(1e-4), 1e-15);
    EXPECT_EQ(xt.amplitude_factor(0, 2), 0.0);
    xt.set_db(2, 0, 30.0);
    EXPECT_THROW(xt.validate(), Error);
}

TEST(McfChannel, UncoupledCoresPassThrough) {
    const std::vector<PulseFrame> frames = {test_frame(50, 1), test_frame(50, 2)};
    const auto out = apply_crosstalk(frames, CrosstalkMatrix(2));
    EXPECT_EQ(out[0].all_symbols(), frames[0].all_symbols());
    EXPECT_EQ(out[1].all_symbols(), frames[1].all_symbols());
}

TEST(McfChannel, CrosstalkAddsScaledNeighbourField) {
    const std::vector<PulseFrame> frames = {test_frame(50, 1), test_frame(50, 2)};
    CrosstalkMatrix xt(2);
    xt.set_symmetric(0, 1, 20.0);
    const auto out = apply_crosstalk(frames, xt);
    for (std::size_t i = 0; i < frames[0].size(); ++i) {
        const auto expected = frames[0].pulses[i].symbol + frames[1].pulses[i].symbol.scaled(0.1);
        EXPECT_NEAR(out[0].pulses[i].symbol.x, expected.x, 1e-12);
        EXPECT_NEAR(out[0].pulses[i].symbol.p, expected.p, 1e-12);
    }
}

TEST(McfChannel, PhaseStepVariance) {
    EXPECT_NEAR(phase_step_variance(20e3, 32e-9), 2.0 * std::numbers::pi * 20e3 * 32e-9, 1e-18);
    EXPECT_EQ(phase_step_variance(0.0, 32e-9), 0.0);
}

TEST(McfChannel, FrequencyOffsetIsDeterministicRotation) {
    const auto frame = test_frame(100);
    CoreChannelParams core;
    core.freq_offset_hz = 1e5;
    ChannelState state(3, 0.2);
    const auto out = apply_phase_noise(frame, core, state);
    const double step = 2.0 * std::numbers::pi * 1e5 * frame.symbol_period;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const auto expected = frame.pulses[i].symbol.rotated(0.2 + step * static_cast<double>(i));
        EXPECT_NEAR(out.pulses[i].symbol.x, expected.x, 1e-9);
        EXPECT_NEAR(out.pulses[i].symbol.p, expected.p, 1e-9);
    }
}

TEST(McfChannel, WienerIncrementsHaveLinewidthVariance) {
    const auto frame = build_frame(gen_gmcs_symbols(100'000, 1.764, 4), 300.0);
    CoreChannelParams core;
    core.linewidth_hz = 20e3;
    ChannelState state(8, 0.0);
    const auto out = apply_phase_noise(frame, core, state);
    // Consecutive reference pulses are two pulse periods apart.
    std::vector<double> increments;
    double prev = 0.0;
    for (std::size_t i = 0; i < out.size(); i += 2) {
        const double phase = std::atan2(out.pulses[i].symbol.p, out.pulses[i].symbol.x);
        if (i > 0) increments.push_back(std::remainder(phase - prev, 2.0 * std::numbers::pi));
        prev = phase;
    }
    const double expected = 2.0 * phase_step_variance(20e3, frame.symbol_period);
    const double n = static_cast<double>(increments.size());
    EXPECT_NEAR(sample_variance(increments), expected, 4.0 * expected * std::sqrt(2.0 / n));
}

TEST(McfChannel, ExcessNoiseVarianceIsEpsOverEta) {
    const auto frame = build_frame(gen_gmcs_symbols(200'000, 1.0, 5), 300.0);
    std::mt19937_64 rng(1);
    const auto noisy = inject_excess_noise(frame, 0.012, 0.18, rng);
    std::vector<double> diff;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        diff.push_back(noisy.pulses[i].symbol.x - frame.pulses[i].symbol.x);
        diff.push_back(noisy.pulses[i].symbol.p - frame.pulses[i].symbol.p);
    }
    const double expected = 0.012 / 0.18;
    EXPECT_NEAR(sample_variance(diff), expected, 4.0 * expected * std::sqrt(2.0 / static_cast<double>(diff.size())));
    EXPECT_THROW(inject_excess_noise(frame, -0.1, 0.18, rng), Error);
}
