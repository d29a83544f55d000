// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <string>

#include "tokmerge/merger.hpp"
#include "tokmerge/partition.hpp"

namespace tokmerge {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point start) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

// c (n x p) += a (n x m) * b (m x p); c must be zero-initialized.
void matmul(const double* a, std::size_t n, std::size_t m, const double* b, std::size_t p,
            double* c) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* a_row = a + i * m;
    double* c_row = c + i * p;
    for (std::size_t k = 0; k < m; ++k) {
      const double av = a_row[k];
      const double* b_row = b + k * p;
      for (std::size_t j = 0; j < p; ++j) {
        c_row[j] += av * b_row[j];
      }
    }
  }
}

// c (n x m) = scale * a (n x d) * b (m x d)^T; rows of both operands are
// contiguous, so each entry is a dot of two contiguous runs.
void matmul_nt_scaled(const double* a, std::size_t n, const double* b, std::size_t m,
                      std::size_t d, double scale, double* c) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* a_row = a + i * d;
    double* c_row = c + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double* b_row = b + j * d;
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        acc += a_row[k] * b_row[k];
      }
      c_row[j] = acc * scale;
    }
  }
}

void softmax_rows(double* values, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = values + i * cols;
    double max_v = row[0];
    for (std::size_t j = 1; j < cols; ++j) {
      max_v = std::max(max_v, row[j]);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      row[j] = std::exp(row[j] - max_v);
      sum += row[j];
    }
    const double inv = 1.0 / sum;
    for (std::size_t j = 0; j < cols; ++j) {
      row[j] *= inv;
    }
  }
}

std::vector<double> project(const TokenMatrix& x, const std::vector<double>& w) {
  std::vector<double> out(x.n_tokens * x.dim, 0.0);
  matmul(x.data.data(), x.n_tokens, x.dim, w.data(), x.dim, out.data());
  return out;
}

void add_in_place(TokenMatrix& x, const TokenMatrix& delta) {
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    x.data[i] += delta.data[i];
  }
}

}  // namespace

void validate_pipeline_spec(const ToyPipelineSpec& spec) {
  if (spec.grid.height == 0 || spec.grid.width == 0) {
    throw std::invalid_argument("grid: height and width must be >= 1");
  }
  if (spec.dim == 0) {
    throw std::invalid_argument("dim: must be >= 1");
  }
  if (spec.timesteps < 1) {
    throw std::invalid_argument("timesteps: must be >= 1");
  }
  if (!(spec.drift_scale >= 0.0) || !std::isfinite(spec.drift_scale)) {
    throw std::invalid_argument("drift: must be finite and >= 0");
  }
  if (spec.layers.empty()) {
    throw std::invalid_argument("layers: at least one layer is required");
  }
  // Roles must read down* bottleneck* up*.
  int phase = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& layer = spec.layers[i];
    if (layer.layer_id != i) {
      throw std::invalid_argument("layers: layer_id must equal the layer position");
    }
    if (layer.window_side == 0) {
      throw std::invalid_argument("window_side: must be >= 1");
    }
    switch (layer.role) {
      case LayerRole::down:
        if (phase > 0) {
          throw std::invalid_argument("layers: down layer after bottleneck/up");
        }
        break;
      case LayerRole::bottleneck:
        if (phase > 1) {
          throw std::invalid_argument("layers: bottleneck layer after up");
        }
        phase = 1;
        break;
      case LayerRole::up:
        phase = 2;
        break;
    }
  }
}

// Query/key entries are N(0, kQueryKeyScale^2), which puts the scaled logits
// at unit-token inputs near std kQueryKeyScale^2 regardless of width, so the
// softmax rows are selective rather than uniform. Value/output entries stay
// at 1/sqrt(dim) so block outputs keep the token scale and residuals stay
// stable over many layers.
constexpr double kQueryKeyScale = 1.7320508075688772;  // sqrt(3)

AttentionProjections AttentionProjections::seeded(std::size_t dim, std::uint64_t stream_seed) {
  if (dim == 0) {
    throw std::invalid_argument("dim: must be >= 1");
  }
  AttentionProjections proj;
  proj.dim = dim;
  SplitMix64 rng(stream_seed);
  auto fill = [&](std::vector<double>& w, double scale) {
    w.resize(dim * dim);
    for (double& v : w) {
      v = rng.next_normal() * scale;
    }
  };
  const double value_scale = 1.0 / std::sqrt(static_cast<double>(dim));
  fill(proj.wq, kQueryKeyScale);
  fill(proj.wk, kQueryKeyScale);
  fill(proj.wv, value_scale);
  fill(proj.wo, value_scale);
  return proj;
}

std::vector<double> attention_weights(const TokenMatrix& tokens, const AttentionProjections& proj) {
  if (tokens.n_tokens == 0 || tokens.dim == 0) {
    throw std::invalid_argument("attention_block: empty token matrix");
  }
  if (tokens.dim != proj.dim) {
    throw std::invalid_argument("attention_block: projection width does not match token dim");
  }
  const std::size_t n = tokens.n_tokens;
  const std::size_t d = tokens.dim;
  const std::vector<double> q = project(tokens, proj.wq);
  const std::vector<double> k = project(tokens, proj.wk);
  std::vector<double> weights(n * n);
  matmul_nt_scaled(q.data(), n, k.data(), n, d, 1.0 / std::sqrt(static_cast<double>(d)),
                   weights.data());
  softmax_rows(weights.data(), n, n);
  return weights;
}

TokenMatrix attention_block(const TokenMatrix& tokens, const AttentionProjections& proj) {
  const std::size_t n = tokens.n_tokens;
  const std::size_t d = tokens.dim;
  const std::vector<double> weights = attention_weights(tokens, proj);
  const std::vector<double> v = project(tokens, proj.wv);

  std::vector<double> mixed(n * d, 0.0);
  matmul(weights.data(), n, n, v.data(), d, mixed.data());

  TokenMatrix out(n, d);
  std::fill(out.data.begin(), out.data.end(), 0.0);
  matmul(mixed.data(), n, d, proj.wo.data(), d, out.data.data());
  return out;
}

TokenMatrix drift_step(const TokenMatrix& tokens, double eps, SplitMix64& noise) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("drift: must be finite and >= 0");
  }
  TokenMatrix out = tokens;
  if (eps > 0.0) {
    for (double& v : out.data) {
      v += eps * noise.next_normal();
    }
  }
  return out;
}

std::uint64_t flop_model(std::uint64_t n_tokens, std::uint64_t dim) {
  if (n_tokens < 1 || dim < 1) {
    throw std::invalid_argument("flop_model: n_tokens and dim must be >= 1");
  }
  return 4 * n_tokens * dim * dim + 2 * n_tokens * n_tokens * dim;
}

TokenMatrix initial_token_field(const GridSpec& grid, std::size_t dim, std::uint64_t seed) {
  if (grid.height == 0 || grid.width == 0 || dim == 0) {
    throw std::invalid_argument("initial_token_field: grid and dim must be >= 1");
  }
  TokenMatrix tokens(grid.token_count(), dim);
  SplitMix64 rng(substream_seed(seed, stream_tag::tokens));
  for (double& v : tokens.data) {
    v = rng.next_normal();
  }
  for (std::size_t i = 0; i < tokens.n_tokens; ++i) {
    auto row = tokens.row(i);
    double norm_sq = 0.0;
    for (double v : row) {
      norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm > 0.0) {
      for (double& v : row) {
        v /= norm;
      }
    }
  }
  return tokens;
}

RunMode parse_run_mode(const std::string& name) {
  if (name == "baseline") return RunMode::baseline;
  if (name == "merged") return RunMode::merged;
  throw std::invalid_argument("mode: unknown value '" + name + "'");
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::baseline: return "baseline";
    case RunMode::merged: return "merged";
  }
  throw std::invalid_argument("mode: invalid value");
}

RunResult run(const ToyPipelineSpec& spec, const MergeConfig& merge_config, RunMode mode,
              const RunOptions& options) {
  validate_pipeline_spec(spec);
  validate_merge_config(merge_config);

  const std::size_t n = spec.grid.token_count();
  const std::size_t d = spec.dim;
  const TokenMatrix x0 = initial_token_field(spec.grid, d, spec.seed);

  std::vector<AttentionProjections> projections;
  projections.reserve(spec.layers.size());
  for (const LayerSpec& layer : spec.layers) {
    projections.push_back(AttentionProjections::seeded(
        d, substream_seed(spec.seed, stream_tag::projections, layer.layer_id)));
  }

  std::map<std::size_t, WindowPartition> partitions;
  for (const LayerSpec& layer : spec.layers) {
    partitions.try_emplace(layer.window_side, partition(spec.grid, layer.window_side));
  }

  RunResult result;
  MetricsRecord& metrics = result.metrics;
  metrics.tokens_before = n;

  // Baseline pass: full-size attention per layer, drift between timesteps.
  TokenMatrix x_base = x0;
  for (std::int64_t t = 0; t < spec.timesteps; ++t) {
    for (const LayerSpec& layer : spec.layers) {
      const auto start = Clock::now();
      const TokenMatrix attended = attention_block(x_base, projections[layer.layer_id]);
      metrics.wall_time_baseline_ns += elapsed_ns(start);
      metrics.baseline_flops += flop_model(n, d);
      add_in_place(x_base, attended);
    }
    if (t + 1 < spec.timesteps) {
      SplitMix64 noise(substream_seed(spec.seed, stream_tag::drift, static_cast<std::uint64_t>(t)));
      x_base = drift_step(x_base, spec.drift_scale, noise);
    }
  }

  if (mode == RunMode::baseline) {
    metrics.tokens_after = n;
    metrics.merged_flops = metrics.baseline_flops;
    metrics.wall_time_merged_ns = metrics.wall_time_baseline_ns;
    metrics.flop_ratio = 1.0;
    metrics.output_mse_vs_baseline = 0.0;
    result.final_tokens = x_base;
    result.baseline_final_tokens = std::move(x_base);
  } else {
    // Merged pass with the same seed-derived inputs and drift noise.
    TokenMatrix x_merged = x0;
    SimilarityCache cache(merge_config.period);
    std::size_t min_merged = n;
    for (std::int64_t t = 0; t < spec.timesteps; ++t) {
      for (const LayerSpec& layer : spec.layers) {
        const WindowPartition& part = partitions.at(layer.window_side);
        std::vector<RepSelection> selections;
        selections.reserve(part.windows.size());
        for (std::size_t wid = 0; wid < part.windows.size(); ++wid) {
          const auto& window = part.windows[wid];
          if (window.size() < 2) {
            continue;
          }
          const std::uint64_t draw =
              substream_seed(spec.seed ^ stream_tag::destination, layer.layer_id, wid,
                             static_cast<std::uint64_t>(t));
          if (options.use_cache) {
            selections.push_back(cache.get_or_compute(t, CacheKey{layer.layer_id, wid}, x_merged,
                                                      window, options.destination, draw));
          } else {
            selections.push_back(
                select_representative(x_merged, window, wid, options.destination, draw));
          }
        }
        const MergePlan plan = build_merge_plan(part, selections, merge_config.ratio);
        min_merged = std::min(min_merged, plan.merged_count);
        const TokenMatrix reduced = merge_tokens(x_merged, plan, merge_config.alpha);

        const auto start = Clock::now();
        const TokenMatrix attended_reduced = attention_block(reduced, projections[layer.layer_id]);
        metrics.wall_time_merged_ns += elapsed_ns(start);
        metrics.merged_flops += flop_model(plan.merged_count, d);

        const TokenMatrix attended = unmerge_tokens(attended_reduced, plan);
        add_in_place(x_merged, attended);
      }
      if (t + 1 < spec.timesteps) {
        SplitMix64 noise(
            substream_seed(spec.seed, stream_tag::drift, static_cast<std::uint64_t>(t)));
        x_merged = drift_step(x_merged, spec.drift_scale, noise);
      }
    }
    metrics.tokens_after = min_merged;
    metrics.flop_ratio =
        static_cast<double>(metrics.merged_flops) / static_cast<double>(metrics.baseline_flops);
    metrics.cache_hits = cache.stats().hits;
    metrics.cache_recomputes = cache.stats().recomputes;
    metrics.output_mse_vs_baseline = mean_squared_diff(x_merged, x_base);
    result.cache_stats = cache.stats();
    result.final_tokens = std::move(x_merged);
    result.baseline_final_tokens = std::move(x_base);
  }

  if (!options.drift_samples.empty()) {
    const WindowPartition& part = partitions.at(spec.layers.front().window_side);
    if (options.drift_window_id >= part.windows.size()) {
      throw std::invalid_argument("drift-window: id out of range");
    }
    const DriftReport report =
        similarity_drift_report(spec, part.windows[options.drift_window_id], options.drift_samples);
    metrics.drift_consecutive_correlations = report.consecutive_correlations;
  }
  return result;
}

DriftReport similarity_drift_report(const ToyPipelineSpec& spec,
                                    std::span<const std::size_t> window,
                                    std::span<const std::int64_t> sample_timesteps) {
  validate_pipeline_spec(spec);
  if (window.size() < 2) {
    throw std::invalid_argument("drift report: window must hold at least 2 tokens");
  }
  if (sample_timesteps.empty()) {
    throw std::invalid_argument("drift report: sample timestep list is empty");
  }
  for (std::size_t i = 0; i < sample_timesteps.size(); ++i) {
    if (sample_timesteps[i] < 0 || sample_timesteps[i] >= spec.timesteps) {
      throw std::out_of_range("drift report: sample timestep outside [0, timesteps)");
    }
    if (i > 0 && sample_timesteps[i] <= sample_timesteps[i - 1]) {
      throw std::invalid_argument("drift report: sample timesteps must be strictly increasing");
    }
  }

  DriftReport report;
  report.timesteps.assign(sample_timesteps.begin(), sample_timesteps.end());

  TokenMatrix tokens = initial_token_field(spec.grid, spec.dim, spec.seed);
  std::int64_t cursor = 0;
  for (std::int64_t target : sample_timesteps) {
    while (cursor < target) {
      SplitMix64 noise(
          substream_seed(spec.seed, stream_tag::drift, static_cast<std::uint64_t>(cursor)));
      tokens = drift_step(tokens, spec.drift_scale, noise);
      ++cursor;
    }
    report.matrices.push_back(cosine_similarity_matrix(tokens, window));
  }

  const std::size_t k = report.matrices.size();
  for (std::size_t i = 1; i < k; ++i) {
    report.consecutive_correlations.push_back(
        pearson_offdiagonal(report.matrices[i - 1], report.matrices[i]));
  }
  report.pairwise_correlations.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double corr = pearson_offdiagonal(report.matrices[i], report.matrices[j]);
      report.pairwise_correlations[i][j] = corr;
      report.pairwise_correlations[j][i] = corr;
    }
  }
  return report;
}

double pearson_offdiagonal(const SimMatrix& a, const SimMatrix& b) {
  if (a.size != b.size || a.size < 2) {
    throw std::invalid_argument("pearson_offdiagonal: matrices must match and hold >= 2 rows");
  }
  const std::size_t n = a.size;
  std::vector<double> xs, ys;
  xs.reserve(n * n - n);
  ys.reserve(n * n - n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) {
        xs.push_back(a.at(i, j));
        ys.push_back(b.at(i, j));
      }
    }
  }
  const double count = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= count;
  mean_y /= count;
  double var_x = 0.0, var_y = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    var_x += dx * dx;
    var_y += dy * dy;
    cov += dx * dy;
  }
  if (var_x < 1e-24 || var_y < 1e-24) {
    double max_diff = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      max_diff = std::max(max_diff, std::abs(xs[i] - ys[i]));
    }
    return max_diff < 1e-12 ? 1.0 : 0.0;
  }
  return cov / std::sqrt(var_x * var_y);
}

double mean_squared_diff(const TokenMatrix& a, const TokenMatrix& b) {
  if (a.n_tokens != b.n_tokens || a.dim != b.dim) {
    throw std::invalid_argument("mean_squared_diff: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double diff = a.data[i] - b.data[i];
    acc += diff * diff;
  }
  return acc / static_cast<double>(a.data.size());
}

bool bit_identical(const TokenMatrix& a, const TokenMatrix& b) {
  return a.n_tokens == b.n_tokens && a.dim == b.dim &&
         std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

}  // namespace tokmerge
