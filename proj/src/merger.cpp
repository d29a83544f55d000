// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/merger.hpp"

#include <algorithm>
#include <string>

namespace tokmerge {

MergePlan build_merge_plan(const WindowPartition& part, std::span<const RepSelection> selections,
                           double ratio) {
  const std::size_t n = part.grid.token_count();
  {
    std::size_t covered = 0;
    for (const auto& window : part.windows) covered += window.size();
    if (covered != n) {
      throw std::invalid_argument("build_merge_plan: partition does not cover the grid");
    }
  }

  std::vector<const RepSelection*> by_window(part.windows.size(), nullptr);
  for (const RepSelection& selection : selections) {
    if (selection.window_id >= part.windows.size()) {
      throw std::invalid_argument("build_merge_plan: selection window_id " +
                                  std::to_string(selection.window_id) + " out of range");
    }
    if (by_window[selection.window_id] != nullptr) {
      throw std::invalid_argument("build_merge_plan: duplicate selection for window " +
                                  std::to_string(selection.window_id));
    }
    by_window[selection.window_id] = &selection;
  }

  MergePlan plan;
  plan.n_tokens = n;
  std::vector<char> removed(n, 0);

  for (std::size_t wid = 0; wid < part.windows.size(); ++wid) {
    const auto& window = part.windows[wid];
    const RepSelection* selection = by_window[wid];
    if (window.size() < 2) {
      if (selection != nullptr) {
        throw std::invalid_argument("build_merge_plan: selection supplied for size-1 window " +
                                    std::to_string(wid));
      }
      continue;  // single-token windows are skipped, the token passes through
    }
    if (selection == nullptr) {
      throw std::invalid_argument("build_merge_plan: missing selection for window " +
                                  std::to_string(wid));
    }
    // {dest} + ranked_rest must be exactly the window's index set.
    std::vector<std::size_t> named;
    named.reserve(window.size());
    named.push_back(selection->dest);
    named.insert(named.end(), selection->ranked_rest.begin(), selection->ranked_rest.end());
    std::vector<std::size_t> expected(window.begin(), window.end());
    std::sort(named.begin(), named.end());
    std::sort(expected.begin(), expected.end());
    if (named != expected) {
      throw std::invalid_argument("build_merge_plan: selection does not match window " +
                                  std::to_string(wid));
    }

    const std::size_t r = compute_r(window.size(), ratio);
    MergeEntry entry;
    entry.window_id = wid;
    entry.dest = selection->dest;
    entry.sources = select_sources(*selection, r);
    for (std::size_t src : entry.sources) {
      removed[src] = 1;
    }
    plan.entries.push_back(std::move(entry));
  }

  plan.new_index_of_old.assign(n, -1);
  plan.old_index_of_new.reserve(n);
  for (std::size_t old = 0; old < n; ++old) {
    if (!removed[old]) {
      plan.new_index_of_old[old] = static_cast<std::ptrdiff_t>(plan.old_index_of_new.size());
      plan.old_index_of_new.push_back(old);
    }
  }
  plan.merged_count = plan.old_index_of_new.size();
  return plan;
}

TokenMatrix merge_tokens(const TokenMatrix& tokens, const MergePlan& plan, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha: must be within [0, 1]");
  }
  if (tokens.n_tokens != plan.n_tokens) {
    throw std::invalid_argument("merge_tokens: plan was built for a different token count");
  }
  if (tokens.dim == 0 || tokens.data.size() != tokens.n_tokens * tokens.dim) {
    throw std::invalid_argument("merge_tokens: malformed token matrix");
  }

  const std::size_t dim = tokens.dim;
  TokenMatrix out(plan.merged_count, dim);
  for (std::size_t new_i = 0; new_i < plan.merged_count; ++new_i) {
    const auto src = tokens.row(plan.old_index_of_new[new_i]);
    std::copy(src.begin(), src.end(), out.row(new_i).begin());
  }

  std::vector<double> acc(dim);
  for (const MergeEntry& entry : plan.entries) {
    const std::size_t r = entry.sources.size();
    if (r == 0) {
      continue;
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t src : entry.sources) {
      const auto row = tokens.row(src);
      for (std::size_t k = 0; k < dim; ++k) {
        acc[k] += row[k];
      }
    }
    const auto dest_row = tokens.row(entry.dest);
    auto out_row = out.row(static_cast<std::size_t>(plan.new_index_of_old[entry.dest]));
    const double inv_r = 1.0 / static_cast<double>(r);
    for (std::size_t k = 0; k < dim; ++k) {
      out_row[k] = alpha * dest_row[k] + (1.0 - alpha) * (acc[k] * inv_r);
    }
  }
  return out;
}

TokenMatrix unmerge_tokens(const TokenMatrix& merged, const MergePlan& plan) {
  if (merged.n_tokens != plan.merged_count) {
    throw std::invalid_argument("unmerge_tokens: merged length does not match the plan");
  }
  if (merged.dim == 0 || merged.data.size() != merged.n_tokens * merged.dim) {
    throw std::invalid_argument("unmerge_tokens: malformed token matrix");
  }

  TokenMatrix out(plan.n_tokens, merged.dim);
  for (std::size_t new_i = 0; new_i < plan.merged_count; ++new_i) {
    const auto src = merged.row(new_i);
    std::copy(src.begin(), src.end(), out.row(plan.old_index_of_new[new_i]).begin());
  }
  for (const MergeEntry& entry : plan.entries) {
    const auto merged_row = merged.row(static_cast<std::size_t>(plan.new_index_of_old[entry.dest]));
    for (std::size_t src : entry.sources) {
      std::copy(merged_row.begin(), merged_row.end(), out.row(src).begin());
    }
  }
  return out;
}

}  // namespace tokmerge
