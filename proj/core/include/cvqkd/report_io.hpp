#pragma once

// Serialization of run reports: per-block CSV, summary JSON, calibration
// JSON, and plot-ready figure tables.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cvqkd/scenario.hpp"

namespace cvqkd {

enum class FigureKind { fig3, fig4, fig5 };

FigureKind parse_figure_kind(std::string_view name);

std::string blocks_csv(const RunReport& report);
std::string summary_json(const RunReport& report);
std::string calibration_json(const RunReport& report);

// Writes the figure tables for `which` into `dir` and returns the paths.
// Throws Error(mode) for keyrate-only and calibration reports.
std::vector<std::filesystem::path> emit_figure_data(const RunReport& report, FigureKind which,
                                                    const std::filesystem::path& dir);

// Writes the outputs that belong to the report's mode into `dir`.
std::vector<std::filesystem::path> write_run_outputs(const RunReport& report, const std::filesystem::path& dir);

}  // namespace cvqkd
