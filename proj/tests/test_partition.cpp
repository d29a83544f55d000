// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <vector>

#include <doctest.h>

#include "oracle.hpp"
#include "tokmerge/partition.hpp"

using namespace tokmerge;

TEST_CASE("partition: 4x4 grid with side 2 tiles exactly") {
  const auto part = partition(GridSpec{4, 4}, 2);
  REQUIRE(part.windows.size() == 4);
  CHECK(part.windows[0] == std::vector<std::size_t>{0, 1, 4, 5});
  CHECK(part.windows[1] == std::vector<std::size_t>{2, 3, 6, 7});
  CHECK(part.windows[2] == std::vector<std::size_t>{8, 9, 12, 13});
  CHECK(part.windows[3] == std::vector<std::size_t>{10, 11, 14, 15});
}

TEST_CASE("partition: window larger than the grid yields one window") {
  const auto part = partition(GridSpec{2, 2}, 4);
  REQUIRE(part.windows.size() == 1);
  CHECK(part.windows[0] == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("partition: 5x5 grid with side 2 clips edges into 9 windows") {
  const GridSpec grid{5, 5};
  const auto part = partition(grid, 2);
  CHECK(part.windows.size() == 9);
  CHECK(oracle::oracle_cover_check(part, grid));
}

TEST_CASE("partition: cover property over every grid up to 64 and side up to 16") {
  for (std::size_t h = 1; h <= 64; ++h) {
    for (std::size_t w = 1; w <= 64; ++w) {
      for (std::size_t s = 1; s <= 16; ++s) {
        const GridSpec grid{h, w};
        const auto part = partition(grid, s);
        if (!oracle::oracle_cover_check(part, grid)) {
          CAPTURE(h);
          CAPTURE(w);
          CAPTURE(s);
          FAIL("partition is not a disjoint rectangular cover");
        }
      }
    }
  }
}

TEST_CASE("partition: window sizes are bounded and interior windows are full") {
  const GridSpec grid{13, 9};
  const std::size_t s = 4;
  const auto part = partition(grid, s);
  const std::size_t tile_cols = (grid.width + s - 1) / s;
  for (std::size_t wid = 0; wid < part.windows.size(); ++wid) {
    const auto& window = part.windows[wid];
    CHECK(window.size() >= 1);
    CHECK(window.size() <= s * s);
    const std::size_t tr = wid / tile_cols;
    const std::size_t tc = wid % tile_cols;
    const bool interior = (tr + 1) * s <= grid.height && (tc + 1) * s <= grid.width;
    if (interior) {
      CHECK(window.size() == s * s);
    }
    CHECK(std::is_sorted(window.begin(), window.end()));
  }
}

TEST_CASE("partition: ordering is deterministic across calls") {
  const auto a = partition(GridSpec{7, 11}, 3);
  const auto b = partition(GridSpec{7, 11}, 3);
  CHECK(a.windows == b.windows);
}

TEST_CASE("partition: invalid arguments") {
  CHECK_THROWS_AS(partition(GridSpec{0, 4}, 2), std::invalid_argument);
  CHECK_THROWS_AS(partition(GridSpec{4, 4}, 0), std::invalid_argument);
}

TEST_CASE("cover oracle rejects corrupted partitions") {
  const GridSpec grid{4, 4};
  auto part = partition(grid, 2);
  REQUIRE(oracle::oracle_cover_check(part, grid));

  auto duplicated = part;
  duplicated.windows[1][0] = duplicated.windows[0][0];  // duplicate index, cover broken
  CHECK(!oracle::oracle_cover_check(duplicated, grid));

  auto ragged = part;
  std::swap(ragged.windows[0][1], ragged.windows[1][0]);  // windows are no longer rectangles
  CHECK(!oracle::oracle_cover_check(ragged, grid));
}

TEST_CASE("adaptive schedule maps roles to sides") {
  const std::vector<LayerRole> roles{LayerRole::down, LayerRole::down, LayerRole::bottleneck,
                                     LayerRole::up, LayerRole::up};
  CHECK(adaptive_schedule(roles, 2, 8) == std::vector<std::size_t>{2, 2, 8, 2, 2});

  const std::vector<LayerRole> bottlenecks(3, LayerRole::bottleneck);
  CHECK(adaptive_schedule(bottlenecks, 2, 8) == std::vector<std::size_t>{8, 8, 8});

  CHECK(adaptive_schedule(std::vector<LayerRole>{}, 2, 8).empty());
}

TEST_CASE("adaptive schedule validates sizes and roles") {
  const std::vector<LayerRole> roles{LayerRole::down};
  CHECK_THROWS_AS(adaptive_schedule(roles, 0, 8), std::invalid_argument);
  CHECK_THROWS_AS(adaptive_schedule(roles, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_layer_role("sideways"), std::invalid_argument);
}
