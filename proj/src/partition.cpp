// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/partition.hpp"

#include <algorithm>

namespace tokmerge {

WindowPartition partition(const GridSpec& grid, std::size_t window_side) {
  if (grid.height == 0 || grid.width == 0) {
    throw std::invalid_argument("grid: height and width must be >= 1");
  }
  if (window_side == 0) {
    throw std::invalid_argument("window_side: must be >= 1");
  }

  WindowPartition part;
  part.grid = grid;
  part.window_side = window_side;
  const std::size_t tile_rows = (grid.height + window_side - 1) / window_side;
  const std::size_t tile_cols = (grid.width + window_side - 1) / window_side;
  part.windows.reserve(tile_rows * tile_cols);

  for (std::size_t tr = 0; tr < tile_rows; ++tr) {
    const std::size_t row_begin = tr * window_side;
    const std::size_t row_end = std::min(row_begin + window_side, grid.height);
    for (std::size_t tc = 0; tc < tile_cols; ++tc) {
      const std::size_t col_begin = tc * window_side;
      const std::size_t col_end = std::min(col_begin + window_side, grid.width);
      std::vector<std::size_t> window;
      window.reserve((row_end - row_begin) * (col_end - col_begin));
      for (std::size_t r = row_begin; r < row_end; ++r) {
        for (std::size_t c = col_begin; c < col_end; ++c) {
          window.push_back(grid.index_of(r, c));
        }
      }
      part.windows.push_back(std::move(window));
    }
  }
  return part;
}

std::vector<std::size_t> adaptive_schedule(std::span<const LayerRole> roles, std::size_t s_small,
                                           std::size_t s_large) {
  if (s_small < 1) {
    throw std::invalid_argument("window sizes: s_small must be >= 1");
  }
  if (s_large < s_small) {
    throw std::invalid_argument("window sizes: s_large must be >= s_small");
  }
  std::vector<std::size_t> sides;
  sides.reserve(roles.size());
  for (LayerRole role : roles) {
    switch (role) {
      case LayerRole::down:
      case LayerRole::up:
        sides.push_back(s_small);
        break;
      case LayerRole::bottleneck:
        sides.push_back(s_large);
        break;
      default:
        throw std::invalid_argument("layers: invalid role value");
    }
  }
  return sides;
}

}  // namespace tokmerge
