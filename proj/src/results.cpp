// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/results.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace tokmerge {

namespace {

constexpr std::array<const char*, 25> kColumns = {
    "schema",         "grid",
    "dim",            "layers",
    "window",         "ratio",
    "alpha",          "period",
    "timesteps",      "drift",
    "seed",           "destination",
    "mode",           "use_cache",
    "timing_reps",    "tokens_before",
    "tokens_after",   "baseline_flops",
    "merged_flops",   "flop_ratio",
    "wall_time_baseline_ns", "wall_time_merged_ns",
    "cache_hits",     "cache_recomputes",
    "output_mse_vs_baseline"};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Cell {
  std::string value;
  bool json_string = false;  // otherwise emitted as a raw JSON literal
};

std::vector<Cell> row_cells(const SweepRow& row) {
  const RunConfig& c = row.config;
  const MetricsRecord& m = row.metrics;
  return {
      {std::string(kResultsSchema), true},
      {format_grid(c.grid), true},
      {std::to_string(c.dim), false},
      {format_layers(c.layers), true},
      {format_window_mode(c.window), true},
      {fmt_double(c.ratio), false},
      {fmt_double(c.alpha), false},
      {std::to_string(c.period), false},
      {std::to_string(c.timesteps), false},
      {fmt_double(c.drift), false},
      {std::to_string(c.seed), false},
      {to_string(c.destination), true},
      {to_string(c.mode), true},
      {c.use_cache ? "true" : "false", false},
      {std::to_string(c.timing_reps), false},
      {std::to_string(m.tokens_before), false},
      {std::to_string(m.tokens_after), false},
      {std::to_string(m.baseline_flops), false},
      {std::to_string(m.merged_flops), false},
      {fmt_double(m.flop_ratio), false},
      {std::to_string(m.wall_time_baseline_ns), false},
      {std::to_string(m.wall_time_merged_ns), false},
      {std::to_string(m.cache_hits), false},
      {std::to_string(m.cache_recomputes), false},
      {fmt_double(m.output_mse_vs_baseline), false},
  };
}

std::string csv_cell(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) {
    return value;
  }
  std::string quoted = "\"";
  for (char ch : value) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

std::string json_escape(const std::string& value) {
  std::string out;
  for (char ch : value) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::span<const char* const> result_columns() { return {kColumns.data(), kColumns.size()}; }

std::string results_to_csv(std::span<const SweepRow> rows) {
  std::string out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i > 0) out += ',';
    out += kColumns[i];
  }
  out += '\n';
  for (const SweepRow& row : rows) {
    const auto cells = row_cells(row);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_cell(cells[i].value);
    }
    out += '\n';
  }
  return out;
}

std::string results_to_json(std::span<const SweepRow> rows) {
  std::string out = "[";
  bool first_row = true;
  for (const SweepRow& row : rows) {
    out += first_row ? "\n" : ",\n";
    first_row = false;
    out += "  {";
    const auto cells = row_cells(row);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ", ";
      out += '"';
      out += kColumns[i];
      out += "\": ";
      if (cells[i].json_string) {
        out += '"';
        out += json_escape(cells[i].value);
        out += '"';
      } else {
        out += cells[i].value;
      }
    }
    out += "}";
  }
  out += rows.empty() ? "]\n" : "\n]\n";
  return out;
}

std::vector<SweepRow> results_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (!doc.is_array()) {
    throw std::invalid_argument("results: expected a JSON array");
  }
  std::vector<SweepRow> rows;
  rows.reserve(doc.size());
  for (const auto& item : doc) {
    if (item.at("schema").get<std::string>() != kResultsSchema) {
      throw std::invalid_argument("results: unknown schema tag");
    }
    SweepRow row;
    RunConfig& c = row.config;
    MetricsRecord& m = row.metrics;
    c.grid = parse_grid(item.at("grid").get<std::string>());
    c.dim = item.at("dim").get<std::size_t>();
    c.layers = parse_layers(item.at("layers").get<std::string>());
    c.window = parse_window_mode(item.at("window").get<std::string>());
    c.ratio = item.at("ratio").get<double>();
    c.alpha = item.at("alpha").get<double>();
    c.period = item.at("period").get<std::int64_t>();
    c.timesteps = item.at("timesteps").get<std::int64_t>();
    c.drift = item.at("drift").get<double>();
    c.seed = item.at("seed").get<std::uint64_t>();
    c.destination = parse_destination_mode(item.at("destination").get<std::string>());
    c.mode = parse_run_mode(item.at("mode").get<std::string>());
    c.use_cache = item.at("use_cache").get<bool>();
    c.timing_reps = item.at("timing_reps").get<int>();
    m.tokens_before = item.at("tokens_before").get<std::uint64_t>();
    m.tokens_after = item.at("tokens_after").get<std::uint64_t>();
    m.baseline_flops = item.at("baseline_flops").get<std::uint64_t>();
    m.merged_flops = item.at("merged_flops").get<std::uint64_t>();
    m.flop_ratio = item.at("flop_ratio").get<double>();
    m.wall_time_baseline_ns = item.at("wall_time_baseline_ns").get<std::uint64_t>();
    m.wall_time_merged_ns = item.at("wall_time_merged_ns").get<std::uint64_t>();
    m.cache_hits = item.at("cache_hits").get<std::uint64_t>();
    m.cache_recomputes = item.at("cache_recomputes").get<std::uint64_t>();
    m.output_mse_vs_baseline = item.at("output_mse_vs_baseline").get<double>();
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  file << content;
  if (!file) {
    throw std::runtime_error("failed writing output file: " + path.string());
  }
}

}  // namespace

void emit_results(std::span<const SweepRow> rows, OutputFormat format,
                  const std::filesystem::path& path) {
  write_file(path, format == OutputFormat::csv ? results_to_csv(rows) : results_to_json(rows));
}

void write_drift_report_files(const DriftReport& report, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  for (std::size_t s = 0; s < report.matrices.size(); ++s) {
    const SimMatrix& sim = report.matrices[s];
    std::string content;
    for (std::size_t i = 0; i < sim.size; ++i) {
      for (std::size_t j = 0; j < sim.size; ++j) {
        if (j > 0) content += ',';
        content += fmt_double(sim.at(i, j));
      }
      content += '\n';
    }
    write_file(directory / ("drift_sim_t" + std::to_string(report.timesteps[s]) + ".csv"),
               content);
  }
  std::string corr = "t_from,t_to,pearson\n";
  for (std::size_t i = 0; i < report.timesteps.size(); ++i) {
    for (std::size_t j = i + 1; j < report.timesteps.size(); ++j) {
      corr += std::to_string(report.timesteps[i]) + "," + std::to_string(report.timesteps[j]) +
              "," + fmt_double(report.pairwise_correlations[i][j]) + "\n";
    }
  }
  write_file(directory / "drift_correlations.csv", corr);
}

}  // namespace tokmerge
