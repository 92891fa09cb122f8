#pragma once

#include "ksl/moments.hpp"
#include "ksl/phase_space.hpp"
#include "ksl/solver.hpp"

#include <string>
#include <vector>

namespace ksl {

// Binary snapshot, little-endian: "KSLB", u32 version = 1, u32 n, u32 nx, u32 nxi,
// f64 x_lo[n], x_hi[n], xi_lo[n], xi_hi[n], f64 time, f64 values (x-major, velocity-minor).
constexpr std::uint32_t snapshot_version = 1;

void write_snapshot(const DistributionField& field, const std::string& path);
// The format does not record the storage convention; the caller supplies it.
DistributionField read_snapshot(const std::string& path, Coordinates coords = Coordinates::physical,
                                std::size_t budget_bytes = default_budget_bytes);

std::string csv_header(int n);
std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows, int n);
void emit_diagnostics_csv(const std::vector<DiagnosticRow>& rows, int n, const std::string& path);

// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double v);

struct SnapshotEntry {
    std::string file;  // relative to the manifest
    double time = 0;
    double clipped_mass = 0;
};

struct Manifest {
    Coordinates coords = Coordinates::characteristic;
    int n = 2;
    DiagnosticsSpec diagnostics;
    std::vector<SnapshotEntry> snapshots;
};

void write_manifest(const Manifest& m, const std::string& path);
Manifest read_manifest(const std::string& path);

// Writes every snapshot of the history plus manifest.json into dir.
Manifest write_history_snapshots(const History& h, const DiagnosticsSpec& diag, const std::string& dir);
// Recomputes diagnostic rows from the snapshots listed in a manifest.
std::vector<DiagnosticRow> rows_from_manifest(const std::string& manifest_path);

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
    bool dashed = false;
};

// Minimal line plot; log_y plots log10 of positive values.
void write_svg_plot(const std::string& path, const std::string& title, const std::vector<PlotSeries>& series,
                    bool log_y = false);

}  // namespace ksl
