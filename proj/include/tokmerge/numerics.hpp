// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tokmerge/types.hpp"

namespace tokmerge {

/// Tokens with an L2 norm below this threshold count as zero; any cosine
/// entry touching such a token is defined as 0.
inline constexpr double kNormEpsilon = 1e-12;

/// Symmetric cosine-similarity matrix over a window of token rows.
struct SimMatrix {
  std::size_t size = 0;
  std::vector<double> values;  // size x size, row-major

  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * size + j]; }
};

/// Entry (a, b) is dot(x_a, x_b) / (|x_a| * |x_b|) for the rows named by
/// `indices`. Each off-diagonal pair is computed once and mirrored, so the
/// result is exactly symmetric; diagonal entries are exactly 1 for tokens
/// with nonzero norm and 0 otherwise.
SimMatrix cosine_similarity_matrix(const TokenMatrix& tokens,
                                   std::span<const std::size_t> indices);

/// result[i] = sum_{j != i} sim(i, j) / (size - 1).
/// Throws degenerate_window_error for a 1x1 matrix.
std::vector<double> row_mean_excluding_self(const SimMatrix& sim);

/// Indices ordered by value descending; ties keep the smaller index first.
std::vector<std::size_t> argsort_descending(std::span<const double> values);

}  // namespace tokmerge
