// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/cache.hpp"

#include <algorithm>

namespace tokmerge {

SimilarityCache::SimilarityCache(std::int64_t period) : period_(period) {
  if (period < 1) {
    throw std::invalid_argument("period: must be >= 1");
  }
}

const RepSelection& SimilarityCache::get_or_compute(std::int64_t t, CacheKey key,
                                                    const TokenMatrix& tokens,
                                                    std::span<const std::size_t> window,
                                                    DestinationMode mode,
                                                    std::uint64_t random_draw) {
  if (t < 0) {
    throw std::invalid_argument("timestep: must be >= 0");
  }
  const bool recompute_due = (t % period_ == 0);
  if (!recompute_due) {
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      const Entry& entry = it->second;
      if (entry.window.size() == window.size() &&
          std::equal(window.begin(), window.end(), entry.window.begin())) {
        ++stats_.hits;
        return entry.selection;
      }
      // Stale: the partition changed since the entry was stored.
      ++stats_.stale_recomputes;
      return recompute(t, key, tokens, window, mode, random_draw);
    }
    // Cold miss on a reuse step falls back to compute-and-store.
  }
  return recompute(t, key, tokens, window, mode, random_draw);
}

const RepSelection& SimilarityCache::recompute(std::int64_t t, CacheKey key,
                                               const TokenMatrix& tokens,
                                               std::span<const std::size_t> window,
                                               DestinationMode mode, std::uint64_t random_draw) {
  Entry entry;
  entry.selection = select_representative(tokens, window, key.window_id, mode, random_draw);
  entry.window.assign(window.begin(), window.end());
  entry.computed_at = t;
  ++stats_.recomputes;
  stats_.recompute_timesteps[key].push_back(t);
  auto [it, inserted] = entries_.insert_or_assign(key, std::move(entry));
  (void)inserted;
  return it->second.selection;
}

void SimilarityCache::invalidate_all() { entries_.clear(); }

void SimilarityCache::invalidate_layer(std::size_t layer_id) {
  auto it = entries_.lower_bound(CacheKey{layer_id, 0});
  while (it != entries_.end() && it->first.layer_id == layer_id) {
    it = entries_.erase(it);
  }
}

}  // namespace tokmerge
