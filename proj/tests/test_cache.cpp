// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include <doctest.h>

#include "tokmerge/cache.hpp"
#include "tokmerge/partition.hpp"
#include "tokmerge/pipeline.hpp"
#include "tokmerge/rng.hpp"

using namespace tokmerge;

namespace {

TokenMatrix uniform_tokens(std::size_t n, std::size_t d, std::uint64_t seed) {
  TokenMatrix tokens(n, d);
  SplitMix64 rng(seed);
  for (double& v : tokens.data) {
    v = rng.next_uniform(-1.0, 1.0);
  }
  return tokens;
}

bool same_selection(const RepSelection& a, const RepSelection& b) {
  return a.window_id == b.window_id && a.dest == b.dest && a.ranked_rest == b.ranked_rest &&
         a.avg_sims == b.avg_sims;
}

}  // namespace

TEST_CASE("cache: period 1 recomputes on every call and matches direct selection") {
  const std::vector<std::size_t> window{0, 1, 2, 3};
  SimilarityCache cache(1);
  TokenMatrix tokens = uniform_tokens(4, 3, 1);
  SplitMix64 noise(99);
  for (std::int64_t t = 0; t < 6; ++t) {
    const auto& cached = cache.get_or_compute(t, CacheKey{0, 0}, tokens, window);
    const auto direct = select_representative(tokens, window, 0);
    CHECK(same_selection(cached, direct));
    tokens = drift_step(tokens, 0.05, noise);
  }
  CHECK(cache.stats().recomputes == 6);
  CHECK(cache.stats().hits == 0);
}

TEST_CASE("cache: period 5 reuses the t=0 selection verbatim") {
  const std::vector<std::size_t> window{0, 1, 2, 3};
  SimilarityCache cache(5);
  TokenMatrix tokens = uniform_tokens(4, 3, 2);
  SplitMix64 noise(100);

  const RepSelection first = cache.get_or_compute(0, CacheKey{0, 0}, tokens, window);
  RepSelection at_t3;
  for (std::int64_t t = 1; t <= 4; ++t) {
    tokens = drift_step(tokens, 0.2, noise);  // drift so a recompute would differ
    const auto& reused = cache.get_or_compute(t, CacheKey{0, 0}, tokens, window);
    if (t == 3) at_t3 = reused;
  }
  CHECK(same_selection(at_t3, first));
  CHECK(cache.stats().recomputes == 1);
  CHECK(cache.stats().hits == 4);
}

TEST_CASE("cache: recompute count and timesteps over 20 steps with period 5") {
  const std::vector<std::size_t> window{0, 1, 2, 3, 4, 5};
  SimilarityCache cache(5);
  TokenMatrix tokens = uniform_tokens(6, 4, 3);
  SplitMix64 noise(101);
  for (std::int64_t t = 0; t < 20; ++t) {
    cache.get_or_compute(t, CacheKey{2, 7}, tokens, window);
    tokens = drift_step(tokens, 0.05, noise);
  }
  const auto& history = cache.stats().recompute_timesteps.at(CacheKey{2, 7});
  CHECK(history == std::vector<std::int64_t>{0, 5, 10, 15});
  CHECK(cache.stats().recomputes == 4);
  CHECK(cache.stats().hits == 16);
}

TEST_CASE("cache: within-period constancy") {
  const std::vector<std::size_t> window{0, 1, 2};
  SimilarityCache cache(4);
  TokenMatrix tokens = uniform_tokens(3, 3, 4);
  SplitMix64 noise(102);
  std::vector<RepSelection> returned;
  for (std::int64_t t = 0; t < 12; ++t) {
    returned.push_back(cache.get_or_compute(t, CacheKey{0, 0}, tokens, window));
    tokens = drift_step(tokens, 0.1, noise);
  }
  for (std::int64_t t = 0; t < 12; ++t) {
    CHECK(same_selection(returned[t], returned[(t / 4) * 4]));
  }
}

TEST_CASE("cache: invalidate_all forces a recompute off the period") {
  const std::vector<std::size_t> window{0, 1, 2, 3};
  SimilarityCache cache(5);
  const TokenMatrix tokens = uniform_tokens(4, 3, 5);
  cache.get_or_compute(0, CacheKey{0, 0}, tokens, window);
  cache.invalidate_all();
  CHECK(cache.entry_count() == 0);
  cache.get_or_compute(7, CacheKey{0, 0}, tokens, window);  // 7 mod 5 != 0, still recomputes
  CHECK(cache.stats().recomputes == 2);
  CHECK(cache.stats().recompute_timesteps.at(CacheKey{0, 0}) ==
        std::vector<std::int64_t>{0, 7});
}

TEST_CASE("cache: invalidate_layer leaves other layers intact") {
  const std::vector<std::size_t> window{0, 1, 2, 3};
  SimilarityCache cache(5);
  const TokenMatrix tokens = uniform_tokens(4, 3, 6);
  cache.get_or_compute(0, CacheKey{1, 0}, tokens, window);
  cache.get_or_compute(0, CacheKey{2, 0}, tokens, window);
  cache.get_or_compute(0, CacheKey{2, 1}, tokens, window);
  cache.invalidate_layer(2);
  CHECK(cache.entry_count() == 1);

  cache.get_or_compute(1, CacheKey{1, 0}, tokens, window);  // hit
  cache.get_or_compute(1, CacheKey{2, 0}, tokens, window);  // cold miss, recompute
  CHECK(cache.stats().hits == 1);
  CHECK(cache.stats().recomputes == 4);
}

TEST_CASE("cache: stale window shape triggers recompute and is counted") {
  const GridSpec grid{4, 4};
  const auto part2 = partition(grid, 2);
  const auto part4 = partition(grid, 4);
  const TokenMatrix tokens = uniform_tokens(16, 3, 7);

  SimilarityCache cache(10);
  cache.get_or_compute(0, CacheKey{0, 0}, tokens, part2.windows[0]);
  // Same key, reuse timestep, different window shape: stale, must recompute.
  const auto& refreshed = cache.get_or_compute(3, CacheKey{0, 0}, tokens, part4.windows[0]);
  CHECK(cache.stats().stale_recomputes == 1);
  CHECK(cache.stats().recomputes == 2);
  CHECK(same_selection(refreshed, select_representative(tokens, part4.windows[0], 0)));
  // The refreshed entry now matches the new shape and is reused.
  cache.get_or_compute(4, CacheKey{0, 0}, tokens, part4.windows[0]);
  CHECK(cache.stats().hits == 1);
}

TEST_CASE("cache: argument validation") {
  CHECK_THROWS_AS(SimilarityCache(0), std::invalid_argument);
  SimilarityCache cache(2);
  const TokenMatrix tokens = uniform_tokens(4, 3, 8);
  const std::vector<std::size_t> window{0, 1};
  CHECK_THROWS_AS(cache.get_or_compute(-1, CacheKey{0, 0}, tokens, window),
                  std::invalid_argument);
}
