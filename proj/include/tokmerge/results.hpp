// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokmerge/config.hpp"
#include "tokmerge/pipeline.hpp"

namespace tokmerge {

/// Schema tag carried in every emitted row; bump when the column set changes.
inline constexpr std::string_view kResultsSchema = "tokmerge.v1";

struct SweepRow {
  RunConfig config;
  MetricsRecord metrics;
};

/// Column names in emission order, shared by the CSV and JSON writers.
std::span<const char* const> result_columns();

/// CSV with one header row; floating-point cells use 17 significant digits so
/// parsing restores the exact double.
std::string results_to_csv(std::span<const SweepRow> rows);

/// JSON array of flat objects with the same keys and formatting rules.
std::string results_to_json(std::span<const SweepRow> rows);

/// Parses results_to_json output back into rows (bit-exact round trip).
std::vector<SweepRow> results_from_json(const std::string& text);

/// Writes the table to disk in the requested format, creating parent
/// directories. Throws std::runtime_error on I/O failure.
void emit_results(std::span<const SweepRow> rows, OutputFormat format,
                  const std::filesystem::path& path);

/// Writes drift_sim_t<k>.csv per sampled timestep plus drift_correlations.csv
/// with the Pearson correlation of every sampled pair.
void write_drift_report_files(const DriftReport& report, const std::filesystem::path& directory);

}  // namespace tokmerge
