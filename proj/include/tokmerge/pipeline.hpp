// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tokmerge/cache.hpp"
#include "tokmerge/numerics.hpp"
#include "tokmerge/rng.hpp"
#include "tokmerge/selector.hpp"
#include "tokmerge/types.hpp"

namespace tokmerge {

/// Deterministic toy iterative-attention pipeline: a role-tagged layer stack,
/// one attention block per layer, additive Gaussian drift between timesteps.
struct ToyPipelineSpec {
  GridSpec grid;
  std::size_t dim = 8;
  std::vector<LayerSpec> layers;
  std::int64_t timesteps = 1;
  double drift_scale = 0.0;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument when the spec violates an invariant
/// (empty layer list, roles not ordered down* bottleneck* up*, ...).
void validate_pipeline_spec(const ToyPipelineSpec& spec);

/// Frozen seeded square projections for one attention block.
struct AttentionProjections {
  std::size_t dim = 0;
  std::vector<double> wq, wk, wv, wo;

  static AttentionProjections seeded(std::size_t dim, std::uint64_t stream_seed);
};

/// softmax(Q K^T / sqrt(d)) V followed by the output projection. Output shape
/// equals input shape; every attention weight row sums to 1.
TokenMatrix attention_block(const TokenMatrix& tokens, const AttentionProjections& proj);

/// The softmax weight matrix of attention_block, row-major n x n.
std::vector<double> attention_weights(const TokenMatrix& tokens, const AttentionProjections& proj);

/// x + eps * eta with eta drawn per entry from the noise stream; eps = 0 is
/// the exact identity.
TokenMatrix drift_step(const TokenMatrix& tokens, double eps, SplitMix64& noise);

/// Attention cost in multiply-accumulate operations: 4*N*d^2 for the Q/K/V
/// and output projections plus 2*N^2*d for Q K^T and weights * V. Used for
/// baseline and merged runs alike.
std::uint64_t flop_model(std::uint64_t n_tokens, std::uint64_t dim);

/// Seeded token field with every row normalized to unit L2 norm.
TokenMatrix initial_token_field(const GridSpec& grid, std::size_t dim, std::uint64_t seed);

enum class RunMode { baseline, merged };

RunMode parse_run_mode(const std::string& name);
std::string to_string(RunMode mode);

struct RunOptions {
  DestinationMode destination = DestinationMode::representative;
  bool use_cache = true;
  /// When non-empty, a drift report over these timesteps is attached to the
  /// metrics (consecutive-pair correlations).
  std::vector<std::int64_t> drift_samples;
  std::size_t drift_window_id = 0;
};

struct MetricsRecord {
  std::uint64_t tokens_before = 0;
  std::uint64_t tokens_after = 0;
  std::uint64_t baseline_flops = 0;
  std::uint64_t merged_flops = 0;
  double flop_ratio = 1.0;
  std::uint64_t wall_time_baseline_ns = 0;
  std::uint64_t wall_time_merged_ns = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_recomputes = 0;
  double output_mse_vs_baseline = 0.0;
  std::vector<double> drift_consecutive_correlations;
};

struct RunResult {
  MetricsRecord metrics;
  TokenMatrix final_tokens;           // final timestep, requested mode
  TokenMatrix baseline_final_tokens;  // final timestep, baseline pass
  CacheStats cache_stats;
};

/// Executes the pipeline. Merged mode also executes the baseline pass with
/// shared seeds so flop_ratio, wall-time comparison and the final-timestep
/// MSE are defined within one record. All non-timing outputs are
/// reproducible bit-exactly from the seed.
RunResult run(const ToyPipelineSpec& spec, const MergeConfig& merge_config, RunMode mode,
              const RunOptions& options = {});

/// Within-window similarity matrices at sampled timesteps of the drift-only
/// token field, plus Pearson correlations between their off-diagonal entries.
struct DriftReport {
  std::vector<std::int64_t> timesteps;
  std::vector<SimMatrix> matrices;
  std::vector<double> consecutive_correlations;          // one per adjacent sample pair
  std::vector<std::vector<double>> pairwise_correlations;  // K x K, diagonal 1
};

/// Evolves the seeded unit-norm token field by drift alone (no attention) and
/// reports how the window's similarity structure decays with timestep gap.
/// Sample timesteps must be strictly increasing and inside [0, T).
DriftReport similarity_drift_report(const ToyPipelineSpec& spec,
                                    std::span<const std::size_t> window,
                                    std::span<const std::int64_t> sample_timesteps);

/// Pearson correlation between the off-diagonal entries of two equally sized
/// matrices. Degenerate (constant) inputs compare by equality: 1 if the
/// matrices match within 1e-12, else 0.
double pearson_offdiagonal(const SimMatrix& a, const SimMatrix& b);

double mean_squared_diff(const TokenMatrix& a, const TokenMatrix& b);
bool bit_identical(const TokenMatrix& a, const TokenMatrix& b);

}  // namespace tokmerge
