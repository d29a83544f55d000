// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/sweep.hpp"

#include <algorithm>
#include <stdexcept>

namespace tokmerge {

namespace {

std::uint64_t median(std::vector<std::uint64_t> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) {
    return values[n / 2];
  }
  return (values[n / 2 - 1] + values[n / 2]) / 2;
}

std::string describe(const RunConfig& c) {
  return "grid=" + format_grid(c.grid) + " window=" + format_window_mode(c.window) +
         " destination=" + to_string(c.destination) + " ratio=" + std::to_string(c.ratio) +
         " alpha=" + std::to_string(c.alpha) + " period=" + std::to_string(c.period);
}

}  // namespace

SweepRow run_single(const RunConfig& config) {
  validate_run_config(config);
  const ToyPipelineSpec spec = pipeline_spec_from(config);
  const MergeConfig merge_config = merge_config_from(config);
  RunOptions options;
  options.destination = config.destination;
  options.use_cache = config.use_cache;

  const int reps = config.timing_reps;
  const int total = reps == 1 ? 1 : reps + 1;  // extra warm-up run when timing
  std::vector<std::uint64_t> baseline_ns, merged_ns;
  SweepRow row;
  row.config = config;
  for (int i = 0; i < total; ++i) {
    RunResult result = run(spec, merge_config, config.mode, options);
    if (total == 1 || i > 0) {
      baseline_ns.push_back(result.metrics.wall_time_baseline_ns);
      merged_ns.push_back(result.metrics.wall_time_merged_ns);
    }
    row.metrics = std::move(result.metrics);
  }
  row.metrics.wall_time_baseline_ns = median(std::move(baseline_ns));
  row.metrics.wall_time_merged_ns = median(std::move(merged_ns));
  return row;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepAxes& axes) {
  const std::vector<GridSpec> grids = axes.grid.empty() ? std::vector{base.grid} : axes.grid;
  const std::vector<WindowMode> windows =
      axes.window.empty() ? std::vector{base.window} : axes.window;
  const std::vector<DestinationMode> destinations =
      axes.destination.empty() ? std::vector{base.destination} : axes.destination;
  const std::vector<double> ratios = axes.ratio.empty() ? std::vector{base.ratio} : axes.ratio;
  const std::vector<double> alphas = axes.alpha.empty() ? std::vector{base.alpha} : axes.alpha;
  const std::vector<std::int64_t> periods =
      axes.period.empty() ? std::vector{base.period} : axes.period;

  std::vector<SweepRow> rows;
  rows.reserve(grids.size() * windows.size() * destinations.size() * ratios.size() *
               alphas.size() * periods.size());
  for (const GridSpec& grid : grids) {
    for (const WindowMode& window : windows) {
      for (const DestinationMode destination : destinations) {
        for (const double ratio : ratios) {
          for (const double alpha : alphas) {
            for (const std::int64_t period : periods) {
              RunConfig config = base;
              config.grid = grid;
              config.window = window;
              config.destination = destination;
              config.ratio = ratio;
              config.alpha = alpha;
              config.period = period;
              try {
                rows.push_back(run_single(config));
              } catch (const std::exception& e) {
                throw std::runtime_error("sweep combination (" + describe(config) +
                                         ") failed: " + e.what());
              }
            }
          }
        }
      }
    }
  }
  return rows;
}

}  // namespace tokmerge
