// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tokmerge/numerics.hpp"
#include "tokmerge/types.hpp"

namespace tokmerge {

/// How the merge destination is picked inside a window. `representative` is
/// the normal path; `least` and `random` exist for ablation runs.
enum class DestinationMode { representative, least, random };

DestinationMode parse_destination_mode(const std::string& name);
std::string to_string(DestinationMode mode);

/// Per-window destination choice plus the remaining tokens ranked by average
/// similarity (descending, smaller index wins ties). avg_sims is aligned with
/// the window's token order; dest and ranked_rest hold global token indices.
struct RepSelection {
  std::size_t window_id = 0;
  std::size_t dest = 0;
  std::vector<std::size_t> ranked_rest;
  std::vector<double> avg_sims;
};

/// Source-token count for a window: floor(window_size * ratio), clamped so at
/// least one token survives. Zero for single-token windows.
std::size_t compute_r(std::size_t window_size, double ratio);

/// Computes within-window average similarities and picks the destination
/// token. `random_draw` feeds the random ablation mode only; the ranking is
/// by average similarity in every mode.
RepSelection select_representative(const TokenMatrix& tokens, std::span<const std::size_t> window,
                                   std::size_t window_id = 0,
                                   DestinationMode mode = DestinationMode::representative,
                                   std::uint64_t random_draw = 0);

/// The first r entries of the ranked candidates, order preserved.
std::vector<std::size_t> select_sources(const RepSelection& selection, std::size_t r);

}  // namespace tokmerge
