#pragma once

#include <string>
#include <vector>

#include "capflow/bench.hpp"

namespace capflow {

// Fixed 14-column diagnostics schema; the header line doubles as the format
// marker. Values print shortest round-trip, NaN prints empty.
std::string csv_header();
std::string csv_line(const DiagRow& row);
void write_csv(const std::string& path, const std::vector<DiagRow>& rows);

// Rejects files whose header differs from csv_header().
std::vector<DiagRow> read_csv(const std::string& path);

std::vector<std::string> diag_column_names();
// Throws on an unknown name, naming it.
double diag_column(const DiagRow& row, const std::string& name);

// Legacy ASCII structured-points snapshot with cell data: alpha, p_d, velocity.
void write_vtk(const std::string& path, const Grid& g, const FlowState& s);

struct PlotSeries {
    std::string label;
    std::vector<double> x, y; // NaN gaps break the polyline
};

// Self-contained SVG line plot; log_y drops nonpositive samples. Throws when
// nothing is plottable.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series, bool log_y = false);

// Machine-readable run record: resolved case parameters, volumes, trailing
// contact angle, and the emitted files.
void write_manifest(const std::string& path, const CaseSetup& setup,
                    const RunResult& result, const std::vector<std::string>& files);

} // namespace capflow
