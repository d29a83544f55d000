// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tokmerge/types.hpp"

namespace tokmerge {

/// Tiles the grid left-to-right, top-to-bottom with window_side x window_side
/// rectangles. Windows at the right/bottom edges are clipped to the remaining
/// rows/columns, never padded and never dropped. Window order is tile
/// row-major; indices within a window are row-major as well.
WindowPartition partition(const GridSpec& grid, std::size_t window_side);

/// Per-layer window sides: down/up layers get s_small, bottleneck layers get
/// s_large.
std::vector<std::size_t> adaptive_schedule(std::span<const LayerRole> roles, std::size_t s_small,
                                           std::size_t s_large);

}  // namespace tokmerge
