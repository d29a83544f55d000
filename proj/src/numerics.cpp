// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tokmerge {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += a[k] * b[k];
  }
  return acc;
}

}  // namespace

SimMatrix cosine_similarity_matrix(const TokenMatrix& tokens,
                                   std::span<const std::size_t> indices) {
  if (indices.empty()) {
    throw std::invalid_argument("cosine_similarity_matrix: empty index list");
  }
  if (tokens.dim == 0 || tokens.data.size() != tokens.n_tokens * tokens.dim) {
    throw std::invalid_argument("cosine_similarity_matrix: malformed token matrix");
  }
  for (std::size_t idx : indices) {
    if (idx >= tokens.n_tokens) {
      throw std::out_of_range("cosine_similarity_matrix: token index " + std::to_string(idx) +
                              " out of range");
    }
  }
  {
    std::vector<std::size_t> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("cosine_similarity_matrix: duplicate token index");
    }
  }
  for (std::size_t idx : indices) {
    for (double v : tokens.row(idx)) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("cosine_similarity_matrix: non-finite token value");
      }
    }
  }

  const std::size_t n = indices.size();
  std::vector<double> norms(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto row = tokens.row(indices[a]);
    norms[a] = std::sqrt(dot(row, row));
  }

  SimMatrix sim;
  sim.size = n;
  sim.values.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    sim.at(a, a) = norms[a] < kNormEpsilon ? 0.0 : 1.0;
  }
  for (std::size_t a = 0; a < n; ++a) {
    const auto row_a = tokens.row(indices[a]);
    for (std::size_t b = a + 1; b < n; ++b) {
      double value = 0.0;
      if (norms[a] >= kNormEpsilon && norms[b] >= kNormEpsilon) {
        value = dot(row_a, tokens.row(indices[b])) / (norms[a] * norms[b]);
      }
      sim.at(a, b) = value;
      sim.at(b, a) = value;
    }
  }
  return sim;
}

std::vector<double> row_mean_excluding_self(const SimMatrix& sim) {
  if (sim.size < 2) {
    throw degenerate_window_error("row_mean_excluding_self: window of size 1 has no neighbors");
  }
  const std::size_t n = sim.size;
  std::vector<double> means(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) {
        acc += sim.at(i, j);
      }
    }
    means[i] = acc / static_cast<double>(n - 1);
  }
  return means;
}

std::vector<std::size_t> argsort_descending(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("argsort_descending: non-finite value");
    }
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

}  // namespace tokmerge
