// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tokmerge/selector.hpp"
#include "tokmerge/types.hpp"

namespace tokmerge {

struct CacheKey {
  std::size_t layer_id = 0;
  std::size_t window_id = 0;
  auto operator<=>(const CacheKey&) const = default;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t recomputes = 0;
  std::uint64_t stale_recomputes = 0;
  std::map<CacheKey, std::vector<std::int64_t>> recompute_timesteps;
};

/// Period-p reuse of per-window selections across timesteps. A selection is
/// recomputed whenever t mod p == 0, on a cold miss, or when the stored
/// window no longer matches the partition (stale entry); otherwise the stored
/// selection is returned verbatim.
class SimilarityCache {
 public:
  explicit SimilarityCache(std::int64_t period);

  const RepSelection& get_or_compute(std::int64_t t, CacheKey key, const TokenMatrix& tokens,
                                     std::span<const std::size_t> window,
                                     DestinationMode mode = DestinationMode::representative,
                                     std::uint64_t random_draw = 0);

  void invalidate_all();
  void invalidate_layer(std::size_t layer_id);

  std::int64_t period() const { return period_; }
  std::size_t entry_count() const { return entries_.size(); }
  const CacheStats& stats() const { return stats_; }

 private:
  struct Entry {
    RepSelection selection;
    std::vector<std::size_t> window;
    std::int64_t computed_at = 0;
  };

  const RepSelection& recompute(std::int64_t t, CacheKey key, const TokenMatrix& tokens,
                                std::span<const std::size_t> window, DestinationMode mode,
                                std::uint64_t random_draw);

  std::int64_t period_;
  std::map<CacheKey, Entry> entries_;
  CacheStats stats_;
};

}  // namespace tokmerge
