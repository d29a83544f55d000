// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tokmerge/partition.hpp"

namespace tokmerge {

namespace {

std::size_t parse_positive_size(const std::string& text, const std::string& key) {
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected a positive integer, got '" + text + "'");
  }
  if (pos != text.size() || value == 0) {
    throw std::invalid_argument(key + ": expected a positive integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

WindowMode parse_window_mode(const std::string& text) {
  WindowMode mode;
  if (text == "adaptive") {
    return mode;  // defaults: 2, 8
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "fixed") {
    if (colon == std::string::npos) {
      throw std::invalid_argument("window: fixed mode needs a side, e.g. fixed:2");
    }
    mode.adaptive = false;
    mode.fixed_side = parse_positive_size(text.substr(colon + 1), "window");
    return mode;
  }
  if (head == "adaptive") {
    const std::string rest = text.substr(colon + 1);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("window: adaptive mode needs two sides, e.g. adaptive:2,8");
    }
    mode.adaptive = true;
    mode.s_small = parse_positive_size(rest.substr(0, comma), "window");
    mode.s_large = parse_positive_size(rest.substr(comma + 1), "window");
    if (mode.s_large < mode.s_small) {
      throw std::invalid_argument("window: s_large must be >= s_small");
    }
    return mode;
  }
  throw std::invalid_argument("window: expected fixed:<s> or adaptive[:<s_small>,<s_large>], got '" +
                              text + "'");
}

std::string format_window_mode(const WindowMode& mode) {
  if (mode.adaptive) {
    return "adaptive:" + std::to_string(mode.s_small) + "," + std::to_string(mode.s_large);
  }
  return "fixed:" + std::to_string(mode.fixed_side);
}

GridSpec parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) {
    throw std::invalid_argument("grid: expected HxW, e.g. 64x64, got '" + text + "'");
  }
  GridSpec grid;
  grid.height = parse_positive_size(text.substr(0, x), "grid");
  grid.width = parse_positive_size(text.substr(x + 1), "grid");
  return grid;
}

std::string format_grid(const GridSpec& grid) {
  return std::to_string(grid.height) + "x" + std::to_string(grid.width);
}

std::vector<LayerRole> parse_layers(const std::string& text) {
  std::vector<LayerRole> roles;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    roles.push_back(parse_layer_role(item));
  }
  if (roles.empty()) {
    throw std::invalid_argument("layers: at least one layer is required");
  }
  return roles;
}

std::string format_layers(const std::vector<LayerRole>& roles) {
  std::string out;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (i > 0) out += ",";
    out += to_string(roles[i]);
  }
  return out;
}

OutputFormat parse_output_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("format: expected csv or json, got '" + name + "'");
}

std::string to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

void validate_run_config(const RunConfig& config) {
  if (config.grid.height == 0 || config.grid.width == 0) {
    throw std::invalid_argument("grid: height and width must be >= 1");
  }
  if (config.dim == 0) {
    throw std::invalid_argument("dim: must be >= 1");
  }
  if (config.layers.empty()) {
    throw std::invalid_argument("layers: at least one layer is required");
  }
  if (!(config.ratio >= 0.0 && config.ratio <= 1.0)) {
    throw std::invalid_argument("ratio: must be within [0, 1]");
  }
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    throw std::invalid_argument("alpha: must be within [0, 1]");
  }
  if (config.period < 1) {
    throw std::invalid_argument("period: must be >= 1");
  }
  if (config.timesteps < 1) {
    throw std::invalid_argument("timesteps: must be >= 1");
  }
  if (!(config.drift >= 0.0) || !std::isfinite(config.drift)) {
    throw std::invalid_argument("drift: must be finite and >= 0");
  }
  if (config.timing_reps < 1) {
    throw std::invalid_argument("timing-reps: must be >= 1");
  }
  if (!config.window.adaptive && config.window.fixed_side == 0) {
    throw std::invalid_argument("window: side must be >= 1");
  }
  if (config.window.adaptive &&
      (config.window.s_small == 0 || config.window.s_large < config.window.s_small)) {
    throw std::invalid_argument("window: need 1 <= s_small <= s_large");
  }
  // Delegates the role-sequence rule; throws with the "layers:" prefix.
  validate_pipeline_spec(pipeline_spec_from(config));
}

void apply_config_file(const std::filesystem::path& path, RunConfig& config, CliOptions& cli) {
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("cannot open config file: " + path.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(file);
  } catch (const std::exception& e) {
    throw std::invalid_argument("config file: malformed JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("config file: top level must be an object");
  }

  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "grid") {
        config.grid = parse_grid(value.get<std::string>());
      } else if (key == "dim") {
        config.dim = value.get<std::size_t>();
      } else if (key == "layers") {
        config.layers = parse_layers(value.get<std::string>());
      } else if (key == "window") {
        config.window = parse_window_mode(value.get<std::string>());
      } else if (key == "ratio") {
        config.ratio = value.get<double>();
      } else if (key == "alpha") {
        config.alpha = value.get<double>();
      } else if (key == "period") {
        config.period = value.get<std::int64_t>();
      } else if (key == "timesteps") {
        config.timesteps = value.get<std::int64_t>();
      } else if (key == "drift") {
        config.drift = value.get<double>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "destination") {
        config.destination = parse_destination_mode(value.get<std::string>());
      } else if (key == "mode") {
        config.mode = parse_run_mode(value.get<std::string>());
      } else if (key == "use_cache") {
        config.use_cache = value.get<bool>();
      } else if (key == "timing_reps") {
        config.timing_reps = value.get<int>();
      } else if (key == "format") {
        cli.format = parse_output_format(value.get<std::string>());
      } else if (key == "output") {
        cli.output = value.get<std::string>();
      } else if (key == "drift_report") {
        cli.drift_report = value.get<bool>();
      } else if (key == "drift_samples") {
        cli.drift_samples = value.get<std::vector<std::int64_t>>();
      } else if (key == "drift_window") {
        cli.drift_window_id = value.get<std::size_t>();
      } else {
        throw std::invalid_argument("unknown config key: " + key);
      }
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument(key + ": wrong value type in config file");
    }
  }
}

ToyPipelineSpec pipeline_spec_from(const RunConfig& config) {
  ToyPipelineSpec spec;
  spec.grid = config.grid;
  spec.dim = config.dim;
  spec.timesteps = config.timesteps;
  spec.drift_scale = config.drift;
  spec.seed = config.seed;

  std::vector<std::size_t> sides;
  if (config.window.adaptive) {
    sides = adaptive_schedule(config.layers, config.window.s_small, config.window.s_large);
  } else {
    sides.assign(config.layers.size(), config.window.fixed_side);
  }
  spec.layers.reserve(config.layers.size());
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    spec.layers.push_back(LayerSpec{i, config.layers[i], sides[i]});
  }
  return spec;
}

MergeConfig merge_config_from(const RunConfig& config) {
  return MergeConfig{config.ratio, config.alpha, config.period};
}

}  // namespace tokmerge
