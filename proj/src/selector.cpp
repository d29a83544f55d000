// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/selector.hpp"

#include <cmath>

namespace tokmerge {

DestinationMode parse_destination_mode(const std::string& name) {
  if (name == "representative") return DestinationMode::representative;
  if (name == "least") return DestinationMode::least;
  if (name == "random") return DestinationMode::random;
  throw std::invalid_argument("destination: unknown mode '" + name + "'");
}

std::string to_string(DestinationMode mode) {
  switch (mode) {
    case DestinationMode::representative: return "representative";
    case DestinationMode::least: return "least";
    case DestinationMode::random: return "random";
  }
  throw std::invalid_argument("destination: invalid mode value");
}

std::size_t compute_r(std::size_t window_size, double ratio) {
  if (window_size == 0) {
    throw std::invalid_argument("window_size: must be >= 1");
  }
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("ratio: must be within [0, 1]");
  }
  const auto r = static_cast<std::size_t>(std::floor(static_cast<double>(window_size) * ratio));
  return std::min(r, window_size - 1);  // the representative always survives
}

RepSelection select_representative(const TokenMatrix& tokens, std::span<const std::size_t> window,
                                   std::size_t window_id, DestinationMode mode,
                                   std::uint64_t random_draw) {
  if (window.size() < 2) {
    throw degenerate_window_error("select_representative: window must hold at least 2 tokens");
  }
  const SimMatrix sim = cosine_similarity_matrix(tokens, window);
  std::vector<double> avg = row_mean_excluding_self(sim);
  const std::vector<std::size_t> order = argsort_descending(avg);

  std::size_t dest_pos = order.front();
  switch (mode) {
    case DestinationMode::representative:
      break;
    case DestinationMode::least: {
      dest_pos = 0;
      for (std::size_t i = 1; i < avg.size(); ++i) {
        if (avg[i] < avg[dest_pos]) {
          dest_pos = i;
        }
      }
      break;
    }
    case DestinationMode::random:
      dest_pos = static_cast<std::size_t>(random_draw % window.size());
      break;
  }

  RepSelection selection;
  selection.window_id = window_id;
  selection.dest = window[dest_pos];
  selection.ranked_rest.reserve(window.size() - 1);
  for (std::size_t pos : order) {
    if (pos != dest_pos) {
      selection.ranked_rest.push_back(window[pos]);
    }
  }
  selection.avg_sims = std::move(avg);
  return selection;
}

std::vector<std::size_t> select_sources(const RepSelection& selection, std::size_t r) {
  if (r > selection.ranked_rest.size()) {
    throw std::invalid_argument("select_sources: r exceeds the ranked candidate count");
  }
  return {selection.ranked_rest.begin(), selection.ranked_rest.begin() + static_cast<std::ptrdiff_t>(r)};
}

}  // namespace tokmerge
