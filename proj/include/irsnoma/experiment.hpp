#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irsnoma/alternating.hpp"

namespace irsnoma {

enum class ScalePreset { Paper, Desk };

/// Full description of a sweep: geometry, propagation, QoS, dimensions or
/// dimension lists, methods, seeding and output location. Defaults follow
/// the simulator's standard setup (30 dB reference loss at 1 m, exponents
/// 3.5/2.2/2.8, rate floor 1.5, noise power 0.01, penalty weight 20,
/// 50 realizations).
struct ExperimentConfig {
  Vec3 bs{0.0, 0.0, 25.0};
  Vec3 irs{50.0, 50.0, 40.0};
  // Users drawn uniformly from [x_min, x_max] x [y_min, y_max] at z = 0.
  double region_x_min = -50.0;
  double region_x_max = 70.0;
  double region_y_min = 50.0;
  double region_y_max = 150.0;
  PathLossParams path_loss;

  std::vector<int> m_values;
  std::vector<int> n_values;
  std::vector<int> k_values;
  std::vector<double> r_min{1.5};  // scalar broadcasts to all users
  double sigma2 = 0.01;

  std::vector<Method> methods{Method::AlternatingDC};
  int realizations = 50;
  std::uint64_t master_seed = 1;
  std::string out_dir = "results";
  std::optional<char> figure;  // links the emitted plot to a preset style

  double epsilon = 1e-3;
  int max_outer_iterations = 30;
  DcSettings dc;
  SolverSettings solver;
  int randomization_samples = 100;
};

/// Parses the key = value grammar described in the README. Unknown keys and
/// constraint violations raise ConfigError naming the line or field.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

/// Canned sweep configurations for the four standard figures:
///   a - convergence trace,  b - power vs antennas,
///   c - power vs reflecting elements,  d - power vs users.
/// Paper scale uses the full-size setups; desk scale shrinks them to sizes
/// that run in minutes.
ExperimentConfig figure_preset(char name, ScalePreset scale);

struct ResultRow {
  std::string run_id;
  std::uint64_t master_seed = 0;
  std::uint64_t realization_seed = 0;
  int m = 0;
  int n = 0;
  int k = 0;
  std::string method;
  double final_power_linear = 0.0;
  double final_power_db = 0.0;
  int outer_iterations = 0;
  std::string status;
  // Diagnostics carried to the trace files (kept out of results.csv so that
  // repeated runs are byte-identical).
  double wall_ms = 0.0;
  std::uint64_t channel_digest = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;     // sorted by (sweep point, method, realization)
  std::vector<RunTrace> traces;    // same order as rows
  ExperimentConfig config;
};

/// Executes the full sweep (points x methods x realizations). Realization
/// seeds are master_seed + index, so every method at a sweep point consumes
/// the identical channel draw. Individual run failures are recorded in the
/// row status; they never abort the sweep. Trace files and a partial CSV
/// are written as runs complete.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Writes results.csv, summary.csv, per-figure SVG plots and returns the
/// paths written. Rows must be non-empty.
std::vector<std::string> emit_outputs(const ExperimentResult& result,
                                      const std::string& out_dir);

std::string results_csv_header();
std::string result_row_csv(const ResultRow& row);
std::vector<ResultRow> parse_results_csv(const std::string& path);

/// One structured text file per run; includes wall-clock and the channel
/// digest used by the pairing checks.
void write_trace_file(const std::string& path, const ResultRow& row,
                      const RunTrace& trace);

struct ParsedTrace {
  std::map<std::string, std::string> fields;
  std::vector<std::vector<double>> iteration_table;  // iter, power, power_db
};
ParsedTrace parse_trace_file(const std::string& path);

}  // namespace irsnoma
