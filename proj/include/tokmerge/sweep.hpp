// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "tokmerge/config.hpp"
#include "tokmerge/results.hpp"

namespace tokmerge {

/// Value lists per sweep parameter; an empty axis falls back to the base
/// config's value.
struct SweepAxes {
  std::vector<GridSpec> grid;
  std::vector<WindowMode> window;
  std::vector<DestinationMode> destination;
  std::vector<double> ratio;
  std::vector<double> alpha;
  std::vector<std::int64_t> period;
};

/// One run with wall-time taken as the median of config.timing_reps
/// repetitions (plus one discarded warm-up when reps > 1). All non-timing
/// fields are identical across repetitions by seed determinism.
SweepRow run_single(const RunConfig& config);

/// Cross product of the axes in fixed nesting order
/// (grid, window, destination, ratio, alpha, period); row order is the
/// row-major order of that product. A failing combination aborts the sweep
/// with the combination named in the error.
std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepAxes& axes);

}  // namespace tokmerge
