// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tokmerge/selector.hpp"
#include "tokmerge/types.hpp"

namespace tokmerge {

struct MergeEntry {
  std::size_t window_id = 0;
  std::size_t dest = 0;
  std::vector<std::size_t> sources;
};

/// Reduction bookkeeping for one token matrix: which tokens fold into which
/// destination, and the order-preserving bijection between surviving old
/// indices and the reduced index range.
struct MergePlan {
  std::size_t n_tokens = 0;
  std::size_t merged_count = 0;
  std::vector<MergeEntry> entries;
  std::vector<std::ptrdiff_t> new_index_of_old;  // -1 for merged-away sources
  std::vector<std::size_t> old_index_of_new;
};

/// Combines the partition with per-window selections: r source tokens per
/// window (compute_r) taken from the top of each ranking. Windows of size 1
/// carry no selection and pass through.
MergePlan build_merge_plan(const WindowPartition& part, std::span<const RepSelection> selections,
                           double ratio);

/// Applies the weighted merge: each surviving destination row becomes
/// alpha * dest + (1 - alpha) * mean(sources). Entries with no sources and
/// all tokens outside merge entries pass through unchanged; row order follows
/// the survivor map.
TokenMatrix merge_tokens(const TokenMatrix& tokens, const MergePlan& plan, double alpha);

/// Restores full length: survivors return to their old positions and every
/// source position receives a copy of its window's merged destination row.
TokenMatrix unmerge_tokens(const TokenMatrix& merged, const MergePlan& plan);

}  // namespace tokmerge
