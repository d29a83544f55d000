// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tokmerge/cache.hpp"
#include "tokmerge/merger.hpp"
#include "tokmerge/numerics.hpp"
#include "tokmerge/partition.hpp"
#include "tokmerge/pipeline.hpp"
#include "tokmerge/selector.hpp"
#include "tokmerge/types.hpp"

namespace py = pybind11;
using namespace tokmerge;

namespace {

using Array2d = py::array_t<double, py::array::c_style | py::array::forcecast>;

TokenMatrix tokens_from_array(const Array2d& array) {
  if (array.ndim() != 2) {
    throw std::invalid_argument("tokens: expected a 2-D array (n_tokens x dim)");
  }
  const auto n = static_cast<std::size_t>(array.shape(0));
  const auto d = static_cast<std::size_t>(array.shape(1));
  std::vector<double> data(array.data(), array.data() + n * d);
  return TokenMatrix::from_data(n, d, std::move(data));
}

py::array_t<double> array_from_tokens(const TokenMatrix& tokens) {
  py::array_t<double> out({tokens.n_tokens, tokens.dim});
  std::copy(tokens.data.begin(), tokens.data.end(), out.mutable_data());
  return out;
}

py::array_t<double> array_from_sim(const SimMatrix& sim) {
  py::array_t<double> out({sim.size, sim.size});
  std::copy(sim.values.begin(), sim.values.end(), out.mutable_data());
  return out;
}

SimMatrix sim_from_array(const Array2d& array) {
  if (array.ndim() != 2 || array.shape(0) != array.shape(1)) {
    throw std::invalid_argument("sim: expected a square 2-D array");
  }
  SimMatrix sim;
  sim.size = static_cast<std::size_t>(array.shape(0));
  sim.values.assign(array.data(), array.data() + sim.size * sim.size);
  return sim;
}

std::vector<LayerRole> roles_from_names(const std::vector<std::string>& names) {
  std::vector<LayerRole> roles;
  roles.reserve(names.size());
  for (const auto& name : names) {
    roles.push_back(parse_layer_role(name));
  }
  return roles;
}

ToyPipelineSpec make_spec(std::pair<std::size_t, std::size_t> grid, std::size_t dim,
                          const std::vector<std::string>& layers,
                          const std::vector<std::size_t>& window_sides, std::int64_t timesteps,
                          double drift, std::uint64_t seed) {
  ToyPipelineSpec spec;
  spec.grid = GridSpec{grid.first, grid.second};
  spec.dim = dim;
  spec.timesteps = timesteps;
  spec.drift_scale = drift;
  spec.seed = seed;
  const auto roles = roles_from_names(layers);
  if (window_sides.size() != roles.size()) {
    throw std::invalid_argument("window_sides: one side per layer is required");
  }
  for (std::size_t i = 0; i < roles.size(); ++i) {
    spec.layers.push_back(LayerSpec{i, roles[i], window_sides[i]});
  }
  return spec;
}

py::dict metrics_to_dict(const MetricsRecord& m) {
  py::dict out;
  out["tokens_before"] = m.tokens_before;
  out["tokens_after"] = m.tokens_after;
  out["baseline_flops"] = m.baseline_flops;
  out["merged_flops"] = m.merged_flops;
  out["flop_ratio"] = m.flop_ratio;
  out["wall_time_baseline_ns"] = m.wall_time_baseline_ns;
  out["wall_time_merged_ns"] = m.wall_time_merged_ns;
  out["cache_hits"] = m.cache_hits;
  out["cache_recomputes"] = m.cache_recomputes;
  out["output_mse_vs_baseline"] = m.output_mse_vs_baseline;
  out["drift_consecutive_correlations"] = m.drift_consecutive_correlations;
  return out;
}

}  // namespace

PYBIND11_MODULE(tokmerge, m) {
  m.doc() = "Windowed representative-token merging engine with a synthetic "
            "iterative-attention benchmark pipeline.";

  py::register_exception<degenerate_window_error>(m, "DegenerateWindowError",
                                                  PyExc_ValueError);

  py::class_<WindowPartition>(m, "WindowPartition")
      .def_property_readonly("windows",
                             [](const WindowPartition& p) { return p.windows; })
      .def_property_readonly("window_side",
                             [](const WindowPartition& p) { return p.window_side; })
      .def_property_readonly(
          "grid", [](const WindowPartition& p) { return std::pair{p.grid.height, p.grid.width}; })
      .def("__len__", [](const WindowPartition& p) { return p.windows.size(); });

  py::class_<RepSelection>(m, "RepSelection")
      .def_readonly("window_id", &RepSelection::window_id)
      .def_readonly("dest", &RepSelection::dest)
      .def_readonly("ranked_rest", &RepSelection::ranked_rest)
      .def_readonly("avg_sims", &RepSelection::avg_sims);

  py::class_<MergePlan>(m, "MergePlan")
      .def_readonly("n_tokens", &MergePlan::n_tokens)
      .def_readonly("merged_count", &MergePlan::merged_count)
      .def_property_readonly("survivors",
                             [](const MergePlan& p) { return p.old_index_of_new; })
      .def_property_readonly("entries", [](const MergePlan& p) {
        py::list out;
        for (const MergeEntry& e : p.entries) {
          py::dict d;
          d["window_id"] = e.window_id;
          d["dest"] = e.dest;
          d["sources"] = e.sources;
          out.append(d);
        }
        return out;
      });

  m.def(
      "partition",
      [](std::size_t height, std::size_t width, std::size_t window_side) {
        return partition(GridSpec{height, width}, window_side);
      },
      py::arg("height"), py::arg("width"), py::arg("window_side"),
      "Tile an HxW token grid into window-local boundaries (edge windows are clipped).");

  m.def(
      "adaptive_schedule",
      [](const std::vector<std::string>& roles, std::size_t s_small, std::size_t s_large) {
        return adaptive_schedule(roles_from_names(roles), s_small, s_large);
      },
      py::arg("roles"), py::arg("s_small") = 2, py::arg("s_large") = 8,
      "Window side per layer: down/up get s_small, bottleneck gets s_large.");

  m.def(
      "cosine_similarity_matrix",
      [](const Array2d& tokens, const std::vector<std::size_t>& indices) {
        return array_from_sim(cosine_similarity_matrix(tokens_from_array(tokens), indices));
      },
      py::arg("tokens"), py::arg("indices"));

  m.def(
      "row_mean_excluding_self",
      [](const Array2d& sim) { return row_mean_excluding_self(sim_from_array(sim)); },
      py::arg("sim"));

  m.def(
      "argsort_descending",
      [](const std::vector<double>& values) { return argsort_descending(values); },
      py::arg("values"));

  m.def("compute_r", &compute_r, py::arg("window_size"), py::arg("ratio"),
        "floor(window_size * ratio), clamped so the representative survives.");

  m.def(
      "select_representative",
      [](const Array2d& tokens, const std::vector<std::size_t>& window, std::size_t window_id,
         const std::string& mode, std::uint64_t random_draw) {
        return select_representative(tokens_from_array(tokens), window, window_id,
                                     parse_destination_mode(mode), random_draw);
      },
      py::arg("tokens"), py::arg("window"), py::arg("window_id") = 0,
      py::arg("mode") = "representative", py::arg("random_draw") = 0);

  m.def("select_sources", &select_sources, py::arg("selection"), py::arg("r"));

  m.def(
      "build_merge_plan",
      [](const WindowPartition& part, const std::vector<RepSelection>& selections, double ratio) {
        return build_merge_plan(part, selections, ratio);
      },
      py::arg("partition"), py::arg("selections"), py::arg("ratio"));

  m.def(
      "merge_tokens",
      [](const Array2d& tokens, const MergePlan& plan, double alpha) {
        return array_from_tokens(merge_tokens(tokens_from_array(tokens), plan, alpha));
      },
      py::arg("tokens"), py::arg("plan"), py::arg("alpha"));

  m.def(
      "unmerge_tokens",
      [](const Array2d& merged, const MergePlan& plan) {
        return array_from_tokens(unmerge_tokens(tokens_from_array(merged), plan));
      },
      py::arg("merged"), py::arg("plan"));

  py::class_<SimilarityCache>(m, "SimilarityCache")
      .def(py::init<std::int64_t>(), py::arg("period"))
      .def(
          "get_or_compute",
          [](SimilarityCache& cache, std::int64_t t, std::size_t layer_id, std::size_t window_id,
             const Array2d& tokens, const std::vector<std::size_t>& window,
             const std::string& mode, std::uint64_t random_draw) {
            return cache.get_or_compute(t, CacheKey{layer_id, window_id},
                                        tokens_from_array(tokens), window,
                                        parse_destination_mode(mode), random_draw);
          },
          py::arg("t"), py::arg("layer_id"), py::arg("window_id"), py::arg("tokens"),
          py::arg("window"), py::arg("mode") = "representative", py::arg("random_draw") = 0)
      .def("invalidate_all", &SimilarityCache::invalidate_all)
      .def("invalidate_layer", &SimilarityCache::invalidate_layer, py::arg("layer_id"))
      .def_property_readonly("period", &SimilarityCache::period)
      .def_property_readonly("entry_count", &SimilarityCache::entry_count)
      .def_property_readonly("hits", [](const SimilarityCache& c) { return c.stats().hits; })
      .def_property_readonly("recomputes",
                             [](const SimilarityCache& c) { return c.stats().recomputes; })
      .def_property_readonly("stale_recomputes",
                             [](const SimilarityCache& c) { return c.stats().stale_recomputes; })
      .def(
          "recompute_timesteps",
          [](const SimilarityCache& c, std::size_t layer_id, std::size_t window_id) {
            const auto& history = c.stats().recompute_timesteps;
            const auto it = history.find(CacheKey{layer_id, window_id});
            return it == history.end() ? std::vector<std::int64_t>{} : it->second;
          },
          py::arg("layer_id"), py::arg("window_id"));

  m.def("flop_model", &flop_model, py::arg("n_tokens"), py::arg("dim"),
        "Attention cost model: 4*N*d^2 + 2*N^2*d multiply-accumulates.");

  m.def(
      "attention_block",
      [](const Array2d& tokens, std::uint64_t proj_seed) {
        const TokenMatrix x = tokens_from_array(tokens);
        return array_from_tokens(
            attention_block(x, AttentionProjections::seeded(x.dim, proj_seed)));
      },
      py::arg("tokens"), py::arg("proj_seed"),
      "Softmax attention with frozen seeded projections.");

  m.def(
      "drift_step",
      [](const Array2d& tokens, double eps, std::uint64_t noise_seed) {
        SplitMix64 noise(noise_seed);
        return array_from_tokens(drift_step(tokens_from_array(tokens), eps, noise));
      },
      py::arg("tokens"), py::arg("eps"), py::arg("noise_seed"));

  m.def(
      "initial_token_field",
      [](std::pair<std::size_t, std::size_t> grid, std::size_t dim, std::uint64_t seed) {
        return array_from_tokens(initial_token_field(GridSpec{grid.first, grid.second}, dim, seed));
      },
      py::arg("grid"), py::arg("dim"), py::arg("seed"));

  m.def(
      "run_pipeline",
      [](std::pair<std::size_t, std::size_t> grid, std::size_t dim,
         const std::vector<std::string>& layers, const std::vector<std::size_t>& window_sides,
         std::int64_t timesteps, double drift, std::uint64_t seed, double ratio, double alpha,
         std::int64_t period, const std::string& mode, const std::string& destination,
         bool use_cache, bool return_tokens) -> py::object {
        const ToyPipelineSpec spec =
            make_spec(grid, dim, layers, window_sides, timesteps, drift, seed);
        RunOptions options;
        options.destination = parse_destination_mode(destination);
        options.use_cache = use_cache;
        const RunResult result =
            run(spec, MergeConfig{ratio, alpha, period}, parse_run_mode(mode), options);
        py::dict metrics = metrics_to_dict(result.metrics);
        if (!return_tokens) {
          return metrics;
        }
        return py::make_tuple(metrics, array_from_tokens(result.final_tokens),
                              array_from_tokens(result.baseline_final_tokens));
      },
      py::arg("grid"), py::arg("dim"), py::arg("layers"), py::arg("window_sides"),
      py::arg("timesteps"), py::arg("drift"), py::arg("seed"), py::arg("ratio"),
      py::arg("alpha"), py::arg("period"), py::arg("mode") = "merged",
      py::arg("destination") = "representative", py::arg("use_cache") = true,
      py::arg("return_tokens") = false,
      "Run the toy pipeline; returns the metrics dict (plus final token matrices when "
      "return_tokens is true).");

  m.def(
      "similarity_drift_report",
      [](std::pair<std::size_t, std::size_t> grid, std::size_t dim, std::int64_t timesteps,
         double drift, std::uint64_t seed, const std::vector<std::size_t>& window,
         const std::vector<std::int64_t>& samples) {
        const ToyPipelineSpec spec =
            make_spec(grid, dim, {"down"}, {2}, timesteps, drift, seed);
        const DriftReport report = similarity_drift_report(spec, window, samples);
        py::dict out;
        out["timesteps"] = report.timesteps;
        py::list matrices;
        for (const SimMatrix& sim : report.matrices) {
          matrices.append(array_from_sim(sim));
        }
        out["matrices"] = matrices;
        out["consecutive_correlations"] = report.consecutive_correlations;
        out["pairwise_correlations"] = report.pairwise_correlations;
        return out;
      },
      py::arg("grid"), py::arg("dim"), py::arg("timesteps"), py::arg("drift"), py::arg("seed"),
      py::arg("window"), py::arg("samples"),
      "Similarity matrices of the drift-only token field at sampled timesteps, with "
      "off-diagonal Pearson correlations.");

  m.attr("__version__") = "0.1.0";
}
