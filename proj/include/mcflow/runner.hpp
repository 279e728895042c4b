#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcflow/bench.hpp"
#include "mcflow/config.hpp"
#include "mcflow/grid.hpp"
#include "mcflow/io.hpp"

namespace mcflow {

/// Aggregated solver statistics over a run.
struct SolverTotals {
  long long newton_iterations = 0;
  long long linear_iterations = 0;
  long long minimize_iterations = 0;
  long long steepest_descent_steps = 0;
  double max_final_residual = 0.0;
};

/// What went wrong when a run stopped on a solver failure.
struct RunFailure {
  std::string module;  ///< "schemes", "minimize", "levelset", ...
  std::string message;
  int step = 0;
  int iterations = 0;
  double residual = 0.0;
};

struct RunResult {
  RunConfig config;
  std::vector<int> steps;             ///< step index of every recorded state
  std::vector<double> times;
  std::vector<double> energies;       ///< J_eps; empty for level-set runs
  std::vector<int> component_counts;
  std::vector<std::pair<double, double>> radii;  ///< (time, radius) while measurable
  std::vector<std::pair<double, Field>> snapshots;
  TopologyTimeline topology;
  std::optional<Field> final_state;
  double final_time = 0.0;
  SolverTotals totals;
  std::optional<RunFailure> failure;
  double runtime_seconds = 0.0;       ///< wall clock; never part of byte-compared artifacts
};

/// Runs the configured pipeline in memory. Solver failures are captured in
/// RunResult::failure (with everything recorded up to the failing step);
/// configuration problems throw ConfigError.
RunResult execute(const RunConfig& config, bool quiet = true);

/// Writes energy.csv, topology.csv, radius.csv (when recorded), snapshots/,
/// config.txt, summary.json and timing.json into `dir`.
void write_artifacts(const RunResult& result, const std::filesystem::path& dir);

/// Serialized summary (deterministic; excludes wall-clock times).
std::string summary_json(const RunResult& result);

/// One row per run plus pairwise max radius deviation when every run
/// recorded radii. Failed runs appear with classification "failed".
CsvTable compare_table(const std::vector<RunResult>& results);
std::optional<CsvTable> radius_deviation_table(const std::vector<RunResult>& results);

/// Largest |r_a(t) - r_b(t)| over times both runs recorded (matched within
/// 1e-12 relative). Returns nullopt when there is no common time.
std::optional<double> max_radius_deviation(const RunResult& a, const RunResult& b);

}  // namespace mcflow
