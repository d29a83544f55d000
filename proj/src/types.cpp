// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/types.hpp"

#include <cmath>

namespace tokmerge {

TokenMatrix TokenMatrix::from_data(std::size_t n, std::size_t d, std::vector<double> values) {
  TokenMatrix m;
  m.n_tokens = n;
  m.dim = d;
  m.data = std::move(values);
  validate_tokens(m);
  return m;
}

void validate_tokens(const TokenMatrix& tokens) {
  if (tokens.n_tokens == 0) {
    throw std::invalid_argument("token matrix: n_tokens must be positive");
  }
  if (tokens.dim == 0) {
    throw std::invalid_argument("token matrix: dim must be positive");
  }
  if (tokens.data.size() != tokens.n_tokens * tokens.dim) {
    throw std::invalid_argument("token matrix: data length must equal n_tokens * dim");
  }
  for (double v : tokens.data) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("token matrix: non-finite value");
    }
  }
}

LayerRole parse_layer_role(const std::string& name) {
  if (name == "down") return LayerRole::down;
  if (name == "bottleneck") return LayerRole::bottleneck;
  if (name == "up") return LayerRole::up;
  throw std::invalid_argument("layers: unknown role '" + name + "'");
}

std::string to_string(LayerRole role) {
  switch (role) {
    case LayerRole::down: return "down";
    case LayerRole::bottleneck: return "bottleneck";
    case LayerRole::up: return "up";
  }
  throw std::invalid_argument("layers: invalid role value");
}

void validate_merge_config(const MergeConfig& config) {
  if (!(config.ratio >= 0.0 && config.ratio <= 1.0)) {
    throw std::invalid_argument("ratio: must be within [0, 1]");
  }
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    throw std::invalid_argument("alpha: must be within [0, 1]");
  }
  if (config.period < 1) {
    throw std::invalid_argument("period: must be >= 1");
  }
}

}  // namespace tokmerge
