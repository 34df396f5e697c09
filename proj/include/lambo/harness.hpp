#pragma once

#include "lambo/baselines.hpp"
#include "lambo/engine.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace lambo {

struct ExperimentConfig {
  std::string preset;  // empty when the problem is given explicitly
  std::string objective;
  std::vector<int> split;
  std::vector<double> costs;  // c_1..c_{N-1}
  std::vector<std::string> methods;
  long horizon = 300;
  long replications = 100;
  std::uint64_t seed = 0;
  double lambda = 0.1;
  std::string output = "results";
  double noise = 0.01;
  int initial_samples = 15;
  LamboConfig lambo;  // lambo.model is shared with the baselines

  /// Every setting, defaults included, as ordered key/value pairs.
  std::vector<std::pair<std::string, std::string>> effective() const;
};

/// Parse a YAML experiment file. Errors carry the offending line.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

Problem problem_for(const ExperimentConfig& cfg);
/// Initial LaMBO partitions for one run: each partitioned module bisected
/// along a coordinate drawn from the run's partition stream.
std::vector<Partition> partitions_for(const ExperimentConfig& cfg, const Problem& problem, long run_id);

BaselineConfig baseline_config(const ExperimentConfig& cfg, MethodId method);

struct RunFailure {
  std::string method;
  long run_id = 0;
  std::string error;
};

struct ExperimentResult {
  std::vector<RunTrace> traces;  // sorted by (method order, run_id)
  std::vector<RunFailure> failures;
};

/// Execute all (method, replication) runs on a worker pool sized by the
/// LAMBO_WORKERS environment variable (default: hardware concurrency).
/// Failed runs are recorded and do not stop the others.
ExperimentResult run_experiment_runs(const ExperimentConfig& cfg);

/// Single run of one method; used by the runner and by tests.
RunTrace run_method(const ExperimentConfig& cfg, const Problem& problem, MethodId method, long run_id);

/// Write traces/<method>_run<id>.csv, summary.json and effective_config.yaml.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

/// parse -> run -> write; returns the result for callers that inspect it.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

int worker_count();

struct CurveRow {
  std::string method;
  long horizon = 0;
  double mean = 0.0;    // mean over runs of R+_T / T
  double stderr_ = 0.0;
  long runs = 0;
};

/// Mean and standard error of R+_T / T per method at each horizon.
std::vector<CurveRow> emit_movement_regret_curve(const std::vector<RunTrace>& traces, const std::vector<long>& horizons);

std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& result);

/// Mean and standard error (sample standard deviation / sqrt(n)).
std::pair<double, double> mean_stderr(const std::vector<double>& v);

}  // namespace lambo
