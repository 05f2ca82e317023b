#pragma once

// HWF1 field files and report emission.
//
// HWF1 layout (little endian): "HWF1", u32 d, u32 n, f64 L, u8 space
// (0 physical, 1 spectral), then n^d (re, im) f64 pairs in storage order.

#include <filesystem>
#include <iosfwd>

#include "hwlab/experiments.hpp"
#include "hwlab/grid.hpp"

namespace hwlab {

void write_field(std::ostream& out, const Field& f);
Field read_field(std::istream& in);

void write_field(const std::filesystem::path& path, const Field& f);
Field read_field(const std::filesystem::path& path);

enum ExitCode : int { exit_pass = 0, exit_error = 1, exit_fail = 2, exit_inconclusive = 3 };

int exit_code(Verdict v);

/// series.csv with a header row and one row per series entry.
std::string series_csv(const Series& s);

/// Writes report.json, series.csv and metadata.json (runtime and timestamp)
/// into `dir`, creating it if needed. Throws Error for an empty series or an
/// unwritable directory. Returns the exit code of the verdict.
int emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace hwlab
