// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tokmerge {

/// Thrown when an operation requires a window of at least two tokens.
class degenerate_window_error : public std::invalid_argument {
 public:
  explicit degenerate_window_error(const std::string& what_arg)
      : std::invalid_argument(what_arg) {}
};

/// N tokens by d features, row-major. The unit every operation acts on.
struct TokenMatrix {
  std::size_t n_tokens = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  TokenMatrix() = default;
  TokenMatrix(std::size_t n, std::size_t d) : n_tokens(n), dim(d), data(n * d, 0.0) {}

  /// Builds a matrix and checks shape and finiteness.
  static TokenMatrix from_data(std::size_t n, std::size_t d, std::vector<double> values);

  std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

/// Throws std::invalid_argument unless shape and finiteness invariants hold.
void validate_tokens(const TokenMatrix& tokens);

/// 2-D token layout; token index for (row, col) is row * width + col.
struct GridSpec {
  std::size_t height = 1;
  std::size_t width = 1;

  std::size_t token_count() const { return height * width; }
  std::size_t index_of(std::size_t row, std::size_t col) const { return row * width + col; }
  bool operator==(const GridSpec&) const = default;
};

enum class LayerRole { down, bottleneck, up };

LayerRole parse_layer_role(const std::string& name);
std::string to_string(LayerRole role);

struct LayerSpec {
  std::size_t layer_id = 0;
  LayerRole role = LayerRole::down;
  std::size_t window_side = 2;
};

/// Disjoint cover of the grid's token indices by rectangular windows.
struct WindowPartition {
  GridSpec grid;
  std::size_t window_side = 1;
  std::vector<std::vector<std::size_t>> windows;
};

struct MergeConfig {
  double ratio = 0.5;
  double alpha = 0.5;
  std::int64_t period = 5;
};

void validate_merge_config(const MergeConfig& config);

}  // namespace tokmerge
