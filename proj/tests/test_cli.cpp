// Copyright (C) 2026 tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "tokmerge/results.hpp"

using namespace tokmerge;
namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

const char* bench_binary() {
  const char* bin = std::getenv("TOKMERGE_BENCH_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "TOKMERGE_BENCH_BIN must point at the CLI binary");
  return bin;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "tokmerge_cli_tests";
  fs::create_directories(dir);
  return dir;
}

CommandResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const fs::path dir = scratch_dir();
  const fs::path out_file = dir / "stdout.txt";
  const fs::path err_file = dir / "stderr.txt";
  const std::string command = env_prefix + std::string(bench_binary()) + " " + args + " >" +
                              out_file.string() + " 2>" + err_file.string();
  const int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_file);
  result.err = read_file(err_file);
  return result;
}

// Common fast flags: tiny grid, single timing rep.
const std::string kFast =
    "--grid 4x4 --dim 4 --layers down,bottleneck,up --timesteps 2 --period 1 "
    "--timing-reps 1 --seed 7 ";

std::string mask_timing_columns(const std::string& csv) {
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  std::vector<std::string> columns;
  {
    std::istringstream cells(header);
    std::string cell;
    while (std::getline(cells, cell, ',')) columns.push_back(cell);
  }
  std::string masked = header + "\n";
  std::string line;
  while (std::getline(lines, line)) {
    // split respecting quotes
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') quoted = !quoted;
      if (ch == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    cells.push_back(cell);
    REQUIRE(cells.size() == columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == "wall_time_baseline_ns" || columns[i] == "wall_time_merged_ns") {
        cells[i] = "-";
      }
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      masked += (i ? "," : "") + cells[i];
    }
    masked += "\n";
  }
  return masked;
}

}  // namespace

TEST_CASE("cli: --help exits cleanly") {
  const auto result = run_cli("--help");
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("--ratio") != std::string::npos);
  CHECK(result.out.find("--period") != std::string::npos);
}

TEST_CASE("cli: a basic run writes one CSV row") {
  const fs::path out = scratch_dir() / "basic.csv";
  const auto result =
      run_cli(kFast + "--ratio 0.5 --alpha 0.5 --window fixed:2 -o " + out.string());
  CHECK(result.exit_code == 0);
  const std::string csv = read_file(out);
  std::istringstream lines(csv);
  std::string header, data, extra;
  REQUIRE(std::getline(lines, header));
  REQUIRE(std::getline(lines, data));
  CHECK(!std::getline(lines, extra));
  CHECK(header.starts_with("schema,"));
  CHECK(data.starts_with("tokmerge.v1,"));
}

TEST_CASE("cli: out-of-range ratio fails naming the key") {
  const auto result = run_cli(kFast + "--ratio 1.5 -o /dev/null");
  CHECK(result.exit_code != 0);
  CHECK(result.err.find("ratio") != std::string::npos);
}

TEST_CASE("cli: unknown flag fails") {
  const auto result = run_cli("--does-not-exist 1");
  CHECK(result.exit_code != 0);
}

TEST_CASE("cli: config file values load and flags override them") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = dir / "config.json";
  {
    std::ofstream out(cfg);
    out << R"({"grid": "4x4", "dim": 4, "layers": "down,bottleneck,up", "timesteps": 2,)"
        << R"( "period": 3, "timing_reps": 1, "window": "fixed:2"})";
  }

  const fs::path out_a = dir / "from_file.json";
  auto result = run_cli("--config " + cfg.string() + " --format json -o " + out_a.string());
  CHECK(result.exit_code == 0);
  auto rows = results_from_json(read_file(out_a));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].config.period == 3);
  CHECK(rows[0].config.window == parse_window_mode("fixed:2"));

  const fs::path out_b = dir / "overridden.json";
  result = run_cli("--config " + cfg.string() + " --period 7 --format json -o " + out_b.string());
  CHECK(result.exit_code == 0);
  rows = results_from_json(read_file(out_b));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].config.period == 7);
}

TEST_CASE("cli: unknown config keys fail by name") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = dir / "bad_config.json";
  {
    std::ofstream out(cfg);
    out << R"({"perod": 3})";
  }
  const auto result = run_cli("--config " + cfg.string() + " -o /dev/null");
  CHECK(result.exit_code != 0);
  CHECK(result.err.find("perod") != std::string::npos);
}

TEST_CASE("cli: sweep axes multiply into ordered rows") {
  const fs::path out = scratch_dir() / "sweep.csv";
  const auto result = run_cli(kFast +
                              "--window fixed:2 --window fixed:4 "
                              "--destination representative,random --ratio 0.5 -o " +
                              out.string());
  CHECK(result.exit_code == 0);
  const std::string csv = read_file(out);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].find("fixed:2") != std::string::npos);
  CHECK(rows[0].find("representative") != std::string::npos);
  CHECK(rows[1].find("fixed:2") != std::string::npos);
  CHECK(rows[1].find("random") != std::string::npos);
  CHECK(rows[2].find("fixed:4") != std::string::npos);
  CHECK(rows[2].find("representative") != std::string::npos);
  CHECK(rows[3].find("fixed:4") != std::string::npos);
  CHECK(rows[3].find("random") != std::string::npos);
}

TEST_CASE("cli: reruns are byte-identical outside the timing columns") {
  const fs::path dir = scratch_dir();
  const fs::path out_a = dir / "rerun_a.csv";
  const fs::path out_b = dir / "rerun_b.csv";
  const std::string args = kFast + "--ratio 0.25,0.75 --window adaptive:2,4 ";
  CHECK(run_cli(args + "-o " + out_a.string()).exit_code == 0);
  CHECK(run_cli(args + "-o " + out_b.string()).exit_code == 0);
  CHECK(mask_timing_columns(read_file(out_a)) == mask_timing_columns(read_file(out_b)));
}

TEST_CASE("cli: JSON output parses back bit-exactly") {
  const fs::path out = scratch_dir() / "results.json";
  const auto result = run_cli(kFast + "--ratio 0.5 --format json -o " + out.string());
  CHECK(result.exit_code == 0);
  const std::string text = read_file(out);
  const auto rows = results_from_json(text);
  REQUIRE(rows.size() == 1);
  CHECK(results_to_json(rows) == text);
  CHECK(rows[0].config.ratio == 0.5);
  CHECK(rows[0].config.timesteps == 2);
}

TEST_CASE("cli: TOKMERGE_OUT_DIR provides the default output directory") {
  const fs::path dir = scratch_dir() / "envdir";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto result = run_cli(kFast + "--ratio 0.5", "TOKMERGE_OUT_DIR=" + dir.string() + " ");
  CHECK(result.exit_code == 0);
  CHECK(fs::exists(dir / "results.csv"));
}

TEST_CASE("cli: drift report writes matrices and correlations") {
  const fs::path dir = scratch_dir() / "drift";
  fs::remove_all(dir);
  const fs::path out = dir / "results.csv";
  const auto result = run_cli(kFast +
                              "--ratio 0.5 --drift 0.01 --drift-report "
                              "--drift-samples 0,1 -o " +
                              out.string());
  CHECK(result.exit_code == 0);
  CHECK(fs::exists(dir / "drift_sim_t0.csv"));
  CHECK(fs::exists(dir / "drift_sim_t1.csv"));
  CHECK(fs::exists(dir / "drift_correlations.csv"));
  const std::string corr = read_file(dir / "drift_correlations.csv");
  CHECK(corr.starts_with("t_from,t_to,pearson"));
}

TEST_CASE("cli: baseline mode runs") {
  const fs::path out = scratch_dir() / "baseline.csv";
  const auto result = run_cli(kFast + "--mode baseline -o " + out.string());
  CHECK(result.exit_code == 0);
  CHECK(read_file(out).find("baseline") != std::string::npos);
}
