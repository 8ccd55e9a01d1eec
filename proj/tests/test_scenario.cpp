#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvqkd/dsp_recovery.hpp"
#include "cvqkd/report_io.hpp"
#include "cvqkd/scenario.hpp"
#include "oracles.hpp"

using namespace cvqkd;
namespace fs = std::filesystem;

namespace {

const char* kSmallSimulation = R"({
  "mode": "simulate",
  "seed": 5,
  "block_size": 10000,
  "n_blocks": 3,
  "simulation": { "max_sync_delay": 40, "figure_points": 2000, "histogram_bins": 30 },
  "cores": [
    { "core_id": 2, "transmittance": 0.673, "excess_noise_snu": 0.012, "linewidth_hz": 20000, "crosstalk_db": { "3": 50 } },
    { "core_id": 3, "loss_db": 1.87, "excess_noise_snu": 0.01, "linewidth_hz": 20000, "crosstalk_db": { "2": 50 } }
  ]
})";

const char* kKeyrate = R"({
  "mode": "keyrate_only",
  "cores": [
    { "core_id": 2, "transmittance": 0.673, "excess_noise_snu": 0.0118 },
    { "core_id": 5, "transmittance": 0.692, "excess_noise_snu": 0.0124 }
  ]
})";

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("cvqkd_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ErrorKind error_kind_of(const std::string& json) {
    try {
        parse_scenario_config(json);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::domain;
}

std::string error_message_of(const std::string& json) {
    try {
        parse_scenario_config(json);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(ScenarioConfig, DefaultsAndParsing) {
    const auto cfg = parse_scenario_config(kSmallSimulation);
    EXPECT_EQ(cfg.mode, RunMode::simulate);
    EXPECT_EQ(cfg.seed, 5u);
    ASSERT_EQ(cfg.cores.size(), 2u);
    EXPECT_NEAR(cfg.cores[1].transmittance, std::pow(10.0, -0.187), 1e-12);
    EXPECT_DOUBLE_EQ(cfg.system.v_mod, 1.764);
    EXPECT_EQ(cfg.fidelity, Fidelity::symbol);
    const auto xt = cfg.crosstalk();
    EXPECT_EQ(xt.size(), 2u);
    EXPECT_DOUBLE_EQ(xt.db(0, 1), 50.0);
}

TEST(ScenarioConfig, MissingModeTakesCallerDefault) {
    const auto cfg = parse_scenario_config(R"({"cores": [{"core_id": 2}]})", RunMode::calibrate);
    EXPECT_EQ(cfg.mode, RunMode::calibrate);
}

TEST(ScenarioConfig, RoundTripsThroughEcho) {
    const auto cfg = parse_scenario_config(kSmallSimulation);
    const auto echoed = scenario_config_to_json(cfg);
    const auto again = parse_scenario_config(echoed);
    EXPECT_EQ(scenario_config_to_json(again), echoed);
}

TEST(ScenarioConfig, UnknownKeysAreRejectedWithPath) {
    EXPECT_EQ(error_kind_of(R"({"cores": [{"core_id": 2}], "blocksize": 5})"), ErrorKind::config);
    EXPECT_NE(error_message_of(R"({"cores": [{"core_id": 2}], "blocksize": 5})").find("blocksize"), std::string::npos);
    const auto nested = error_message_of(R"({"system": {"vmod": 1.0}, "cores": [{"core_id": 2}]})");
    EXPECT_NE(nested.find("config.system"), std::string::npos);
    EXPECT_NE(nested.find("vmod"), std::string::npos);
    const auto in_core = error_message_of(R"({"cores": [{"core_id": 2, "eps": 0.1}]})");
    EXPECT_NE(in_core.find("config.cores[0]"), std::string::npos);
}

TEST(ScenarioConfig, ValidationErrors) {
    EXPECT_EQ(error_kind_of(R"({"block_size": 100, "cores": [{"core_id": 2}]})"), ErrorKind::config);
    EXPECT_EQ(error_kind_of(R"({"cores": []})"), ErrorKind::config);
    EXPECT_EQ(error_kind_of(R"({"cores": [{"core_id": 2}, {"core_id": 2}]})"), ErrorKind::config);
    EXPECT_EQ(error_kind_of(R"({"cores": [{"core_id": 9}]})"), ErrorKind::config);
    EXPECT_EQ(error_kind_of(R"({"cores": [{"core_id": 2, "transmittance": 0.5, "loss_db": 3}]})"), ErrorKind::config);
    EXPECT_EQ(error_kind_of(R"({"mode": "fast", "cores": [{"core_id": 2}]})"), ErrorKind::config);
    EXPECT_EQ(error_kind_of(R"({"seed": -1, "cores": [{"core_id": 2}]})"), ErrorKind::config);
    EXPECT_EQ(error_kind_of(R"({"cores": [{"core_id": 2, "crosstalk_db": {"3": 40}}]})"), ErrorKind::config);
    EXPECT_EQ(error_kind_of(R"({"cores": [{"core_id": 2, "crosstalk_db": {"2": 40}}]})"), ErrorKind::config);
    EXPECT_EQ(error_kind_of("{not json"), ErrorKind::config);
    std::string eight = R"({"cores": [)";
    for (int i = 1; i <= 8; ++i) eight += std::string(i > 1 ? "," : "") + R"({"core_id": )" + std::to_string(std::min(i, 7)) + "}";
    eight += "]}";
    EXPECT_EQ(error_kind_of(eight), ErrorKind::config);
}

TEST(Scenario, ZeroBlocksGivesEmptyReport) {
    auto cfg = parse_scenario_config(kSmallSimulation);
    cfg.n_blocks = 0;
    const auto report = run_scenario(cfg);
    EXPECT_TRUE(report.per_block.empty());
    EXPECT_TRUE(report.failures.empty());
    EXPECT_FALSE(report.all_blocks_failed());
    EXPECT_EQ(report.aggregate_skr, 0.0);
}

TEST(Scenario, KeyrateModeEvaluatesConfiguredPoints) {
    const auto report = run_scenario(parse_scenario_config(kKeyrate));
    ASSERT_EQ(report.per_block.size(), 2u);
    const SystemParams p;
    EXPECT_NEAR(report.per_block[0].key.skr, secret_key_rate(p, 0.673, 0.0118).skr, 1e-3);
    std::vector<KeyRateResult> keys = {report.per_block[0].key, report.per_block[1].key};
    EXPECT_DOUBLE_EQ(report.aggregate_skr, aggregate_skr(keys));
    EXPECT_THROW(emit_figure_data(report, FigureKind::fig5, temp_dir("keyrate_fig")), Error);
}

TEST(Scenario, SimulationSummariesAreExactMeans) {
    const auto report = run_scenario(parse_scenario_config(kSmallSimulation));
    ASSERT_TRUE(report.failures.empty()) << report.failures.front().message;
    ASSERT_EQ(report.per_block.size(), 6u);
    for (std::size_t i = 1; i < report.per_block.size(); ++i) {
        const auto& a = report.per_block[i - 1];
        const auto& b = report.per_block[i];
        EXPECT_TRUE(a.core_id < b.core_id || (a.core_id == b.core_id && a.block_index < b.block_index));
    }
    std::vector<KeyRateResult> means;
    for (const auto& s : report.per_core_summary) {
        std::vector<double> eps, skr;
        for (const auto& r : report.per_block)
            if (r.core_id == s.core_id) {
                eps.push_back(r.estimate.eps);
                skr.push_back(r.key.skr);
            }
        EXPECT_NEAR(s.eps, oracle::mean(eps), 1e-15);
        EXPECT_NEAR(s.skr, oracle::mean(skr), 1e-6);
        KeyRateResult m;
        m.skr = s.skr;
        means.push_back(m);
    }
    EXPECT_DOUBLE_EQ(report.aggregate_skr, aggregate_skr(means));
    for (const auto& r : report.per_block) {
        EXPECT_NEAR(r.estimate.t_hat, r.core_id == 2 ? 0.673 : std::pow(10.0, -0.187), 0.05);
        EXPECT_LT(r.estimate.eps, 0.045);
    }
}

TEST(Scenario, RerunsAreByteIdentical) {
    const auto cfg = parse_scenario_config(kSmallSimulation);
    const auto d1 = temp_dir("rerun1");
    const auto d2 = temp_dir("rerun2");
    auto multi = cfg;
    multi.workers = 3;
    write_run_outputs(run_scenario(cfg), d1);
    write_run_outputs(run_scenario(multi), d2);
    EXPECT_EQ(read_file(d1 / "blocks.csv"), read_file(d2 / "blocks.csv"));
    // The echoed worker count differs; compare everything before it.
    const auto s1 = read_file(d1 / "summary.json");
    const auto s2 = read_file(d2 / "summary.json");
    EXPECT_EQ(s1.substr(0, s1.find("\"config_echo\"")), s2.substr(0, s2.find("\"config_echo\"")));

    const auto d3 = temp_dir("rerun3");
    write_run_outputs(run_scenario(cfg), d3);
    EXPECT_EQ(read_file(d1 / "summary.json"), read_file(d3 / "summary.json"));
}

TEST(Scenario, EchoedConfigReproducesReport) {
    const auto cfg = parse_scenario_config(kSmallSimulation);
    const auto first = run_scenario(cfg);
    const auto second = run_scenario(parse_scenario_config(scenario_config_to_json(first.config_echo)));
    EXPECT_EQ(blocks_csv(first), blocks_csv(second));
}

TEST(Scenario, BlocksCsvLayout) {
    const auto csv = blocks_csv(run_scenario(parse_scenario_config(kKeyrate)));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "core_id,block_index,eps_snu,t_hat,i_ab_bits,chi_be_bits,skr_bps");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Scenario, FigureData) {
    auto cfg = parse_scenario_config(kSmallSimulation);
    const auto report = run_scenario(cfg);
    const auto dir = temp_dir("figures");
    const auto fig5 = emit_figure_data(report, FigureKind::fig5, dir);
    const auto rows = read_file(fig5.at(0));
    // Header plus one row per (core, block).
    EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 1 + 2 * 3);
    EXPECT_EQ(emit_figure_data(report, FigureKind::fig3, dir).size(), 2u);
    EXPECT_EQ(emit_figure_data(report, FigureKind::fig4, dir).size(), 2u);

    ASSERT_EQ(report.figures.size(), 2u);
    const auto& f = report.figures[0];
    std::vector<double> before, after;
    for (std::size_t i = 0; i < f.pre_recovery.size(); ++i)
        if (f.pre_kinds[i] == PulseKind::reference) before.push_back(ref_phase(f.pre_recovery[i]));
    for (const auto& r : f.post_refs) after.push_back(ref_phase(r));
    EXPECT_LT(std::sqrt(oracle::variance(after)), 0.25);
    EXPECT_LT(std::abs(oracle::mean(after)), 0.05);
    EXPECT_EQ(f.alice_first.size(), 40u);
    EXPECT_NEAR(f.alice_x_variance, 1.764, 0.1);
    EXPECT_NEAR(f.bob_x_variance, predicted_bob_variance(cfg.system, 0.673, 0.012), 0.05);
    std::size_t alice_total = 0;
    for (auto c : f.x_histogram.alice) alice_total += c;
    EXPECT_GT(alice_total, 9900u);
}

TEST(Scenario, UnrecoverableBlocksAreCountedAsFailures) {
    auto cfg = parse_scenario_config(kSmallSimulation);
    cfg.cores.resize(1);
    cfg.cores[0].crosstalk_db.fill(kNoCoupling);
    cfg.cores[0].transmittance = 1e-7;
    cfg.n_blocks = 2;
    const auto report = run_scenario(cfg);
    EXPECT_TRUE(report.per_block.empty());
    ASSERT_EQ(report.failures.size(), 2u);
    EXPECT_EQ(report.failures[0].kind, ErrorKind::sync_failure);
    EXPECT_TRUE(report.all_blocks_failed());
    EXPECT_EQ(report.per_core_summary.at(0).blocks_failed, 2u);
}

TEST(Scenario, CalibrationMode) {
    auto cfg = parse_scenario_config(R"({"mode": "calibrate", "cores": [{"core_id": 2}, {"core_id": 4}]})");
    const auto report = run_scenario(cfg);
    ASSERT_EQ(report.calibrations.size(), 2u);
    EXPECT_NEAR(report.calibrations[0].record.v_elec_snu, 0.021, 0.0021);
    const auto paths = write_run_outputs(report, temp_dir("calibration"));
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_EQ(paths[0].filename(), "calibration.json");
    EXPECT_THROW(emit_figure_data(report, FigureKind::fig3, temp_dir("calibration_fig")), Error);
}

TEST(Scenario, WaveformFidelityMatchesSymbolLevel) {
    auto cfg = parse_scenario_config(kSmallSimulation);
    cfg.cores.resize(1);
    cfg.cores[0].crosstalk_db.fill(kNoCoupling);
    cfg.n_blocks = 1;
    const auto symbol = run_scenario(cfg);
    cfg.fidelity = Fidelity::waveform;
    const auto waveform = run_scenario(cfg);
    ASSERT_EQ(symbol.per_block.size(), 1u);
    ASSERT_EQ(waveform.per_block.size(), 1u);
    EXPECT_NEAR(symbol.per_block[0].estimate.t_hat, waveform.per_block[0].estimate.t_hat, 1e-12);
    EXPECT_NEAR(symbol.per_block[0].estimate.eps, waveform.per_block[0].estimate.eps, 1e-12);
}
