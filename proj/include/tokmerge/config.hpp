// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tokmerge/pipeline.hpp"
#include "tokmerge/selector.hpp"
#include "tokmerge/types.hpp"

namespace tokmerge {

/// fixed:s applies one window side everywhere; adaptive:s_small,s_large maps
/// down/up layers to s_small and bottleneck layers to s_large.
struct WindowMode {
  bool adaptive = true;
  std::size_t fixed_side = 2;
  std::size_t s_small = 2;
  std::size_t s_large = 8;

  bool operator==(const WindowMode&) const = default;
};

WindowMode parse_window_mode(const std::string& text);
std::string format_window_mode(const WindowMode& mode);

GridSpec parse_grid(const std::string& text);
std::string format_grid(const GridSpec& grid);

std::vector<LayerRole> parse_layers(const std::string& text);
std::string format_layers(const std::vector<LayerRole>& roles);

enum class OutputFormat { csv, json };
OutputFormat parse_output_format(const std::string& name);
std::string to_string(OutputFormat format);

/// One complete run configuration; every field is enough provenance to rerun
/// the same point.
struct RunConfig {
  GridSpec grid{32, 32};
  std::size_t dim = 32;
  std::vector<LayerRole> layers{LayerRole::down, LayerRole::down, LayerRole::bottleneck,
                                LayerRole::up, LayerRole::up};
  WindowMode window{};
  double ratio = 0.5;
  double alpha = 0.5;
  std::int64_t period = 5;
  std::int64_t timesteps = 10;
  double drift = 0.01;
  std::uint64_t seed = 42;
  DestinationMode destination = DestinationMode::representative;
  RunMode mode = RunMode::merged;
  bool use_cache = true;
  int timing_reps = 5;

  bool operator==(const RunConfig&) const = default;
};

/// Throws std::invalid_argument naming the offending key.
void validate_run_config(const RunConfig& config);

/// Output and reporting choices that live outside the run semantics.
struct CliOptions {
  OutputFormat format = OutputFormat::csv;
  std::string output;  // empty: <out dir>/results.<ext>
  bool drift_report = false;
  std::vector<std::int64_t> drift_samples;  // empty: every timestep
  std::size_t drift_window_id = 0;
};

/// Loads a JSON config file over the given structs. Unknown keys and type
/// mismatches throw std::invalid_argument naming the key.
void apply_config_file(const std::filesystem::path& path, RunConfig& config, CliOptions& cli);

ToyPipelineSpec pipeline_spec_from(const RunConfig& config);
MergeConfig merge_config_from(const RunConfig& config);

}  // namespace tokmerge
