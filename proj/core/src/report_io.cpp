#include "cvqkd/report_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "config_json.hpp"

namespace cvqkd {

using nlohmann::ordered_json;

namespace {

// JSON has no infinity; non-finite values are written as null.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::filesystem::path write_text(const std::filesystem::path& dir, const char* name, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::config, "cannot create output directory " + dir.string() + ": " + ec.message());
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::config, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorKind::config, "write failed for " + path.string());
    return path;
}

void require_simulation(const RunReport& report) {
    if (report.mode != RunMode::simulate)
        fail(ErrorKind::mode, "figure data needs a simulate run, got " + std::string(to_string(report.mode)));
}

std::string fig3_pre(const RunReport& report) {
    std::string out = "core_id,index,kind,x,p\n";
    for (const auto& f : report.figures)
        for (std::size_t i = 0; i < f.pre_recovery.size(); ++i)
            out += fmt::format("{},{},{},{},{}\n", f.core_id, i,
                               f.pre_kinds[i] == PulseKind::reference ? "reference" : "quantum", f.pre_recovery[i].x,
                               f.pre_recovery[i].p);
    return out;
}

std::string fig3_post(const RunReport& report) {
    std::string out = "core_id,index,kind,x,p\n";
    for (const auto& f : report.figures) {
        for (std::size_t i = 0; i < f.post_refs.size(); ++i)
            out += fmt::format("{},{},reference,{},{}\n", f.core_id, i, f.post_refs[i].x, f.post_refs[i].p);
        for (std::size_t i = 0; i < f.post_quantum.size(); ++i)
            out += fmt::format("{},{},quantum,{},{}\n", f.core_id, i, f.post_quantum[i].x, f.post_quantum[i].p);
    }
    return out;
}

std::string fig4_symbols(const RunReport& report) {
    std::string out = "core_id,index,alice_x,alice_p,bob_x,bob_p\n";
    for (const auto& f : report.figures)
        for (std::size_t i = 0; i < f.alice_first.size(); ++i)
            out += fmt::format("{},{},{},{},{},{}\n", f.core_id, i, f.alice_first[i].x, f.alice_first[i].p,
                               f.bob_first[i].x, f.bob_first[i].p);
    return out;
}

std::string fig4_hist(const RunReport& report) {
    std::string out = "core_id,bin_lo,bin_hi,alice_count,bob_count\n";
    for (const auto& f : report.figures) {
        const auto& h = f.x_histogram;
        const std::size_t bins = h.alice.size();
        const double width = bins ? (h.hi - h.lo) / static_cast<double>(bins) : 0.0;
        for (std::size_t k = 0; k < bins; ++k)
            out += fmt::format("{},{},{},{},{}\n", f.core_id, h.lo + width * static_cast<double>(k),
                               h.lo + width * static_cast<double>(k + 1), h.alice[k], h.bob[k]);
    }
    return out;
}

std::string fig5_blocks(const RunReport& report) {
    std::string out = "core_id,block_index,eps_snu,t_hat,skr_bps\n";
    for (const auto& r : report.per_block)
        out += fmt::format("{},{},{},{},{}\n", r.core_id, r.block_index, r.estimate.eps, r.estimate.t_hat, r.key.skr);
    return out;
}

}  // namespace

FigureKind parse_figure_kind(std::string_view name) {
    if (name == "fig3") return FigureKind::fig3;
    if (name == "fig4") return FigureKind::fig4;
    if (name == "fig5") return FigureKind::fig5;
    fail(ErrorKind::config, "unknown figure '" + std::string(name) + "' (expected fig3, fig4 or fig5)");
}

std::string blocks_csv(const RunReport& report) {
    std::string out = "core_id,block_index,eps_snu,t_hat,i_ab_bits,chi_be_bits,skr_bps\n";
    for (const auto& r : report.per_block)
        out += fmt::format("{},{},{},{},{},{},{}\n", r.core_id, r.block_index, r.estimate.eps, r.estimate.t_hat,
                           r.key.i_ab, r.key.chi_be, r.key.skr);
    return out;
}

std::string summary_json(const RunReport& report) {
    ordered_json j;
    j["version"] = report.version;
    j["mode"] = std::string(to_string(report.mode));
    ordered_json cores = ordered_json::array();
    for (const auto& s : report.per_core_summary) {
        ordered_json c;
        c["core_id"] = s.core_id;
        c["blocks_ok"] = s.blocks_ok;
        c["blocks_failed"] = s.blocks_failed;
        c["eps_snu"] = number(s.eps);
        c["t_hat"] = number(s.t_hat);
        c["i_ab_bits"] = number(s.i_ab);
        c["chi_be_bits"] = number(s.chi_be);
        c["skr_bps"] = number(s.skr);
        c["skr_raw_bps"] = number(s.skr_raw);
        c["v_b_snu"] = number(s.v_b);
        c["t_hat_rel_std"] = number(s.t_hat_rel_std);
        cores.push_back(std::move(c));
    }
    j["per_core_summary"] = std::move(cores);
    j["aggregate_skr_bps"] = number(report.aggregate_skr);
    ordered_json failures = ordered_json::array();
    for (const auto& f : report.failures) {
        ordered_json e;
        e["core_id"] = f.core_id;
        e["block_index"] = f.block_index;
        e["kind"] = std::string(to_string(f.kind));
        e["message"] = f.message;
        failures.push_back(std::move(e));
    }
    j["failures"] = std::move(failures);
    j["config_echo"] = detail::config_to_json(report.config_echo);
    return j.dump(2) + "\n";
}

std::string calibration_json(const RunReport& report) {
    ordered_json j;
    j["version"] = report.version;
    ordered_json cores = ordered_json::array();
    for (const auto& c : report.calibrations) {
        ordered_json e;
        e["core_id"] = c.core_id;
        e["shot_var_raw"] = number(c.record.shot_var_raw);
        e["elec_var_raw"] = number(c.record.elec_var_raw);
        e["snu_scale"] = number(c.record.snu_scale);
        e["v_elec_snu"] = number(c.record.v_elec_snu);
        e["clearance_db"] = number(c.record.clearance_db);
        cores.push_back(std::move(e));
    }
    j["calibrations"] = std::move(cores);
    ordered_json failures = ordered_json::array();
    for (const auto& f : report.failures)
        failures.push_back({{"core_id", f.core_id}, {"kind", std::string(to_string(f.kind))}, {"message", f.message}});
    j["failures"] = std::move(failures);
    j["config_echo"] = detail::config_to_json(report.config_echo);
    return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_figure_data(const RunReport& report, FigureKind which,
                                                    const std::filesystem::path& dir) {
    require_simulation(report);
    switch (which) {
    case FigureKind::fig3:
        return {write_text(dir, "fig3_pre.csv", fig3_pre(report)), write_text(dir, "fig3_post.csv", fig3_post(report))};
    case FigureKind::fig4:
        return {write_text(dir, "fig4_symbols.csv", fig4_symbols(report)),
                write_text(dir, "fig4_hist.csv", fig4_hist(report))};
    case FigureKind::fig5:
        return {write_text(dir, "fig5_blocks.csv", fig5_blocks(report))};
    }
    return {};
}

std::vector<std::filesystem::path> write_run_outputs(const RunReport& report, const std::filesystem::path& dir) {
    if (report.mode == RunMode::calibrate) return {write_text(dir, "calibration.json", calibration_json(report))};
    return {write_text(dir, "blocks.csv", blocks_csv(report)), write_text(dir, "summary.json", summary_json(report))};
}

}  // namespace cvqkd
