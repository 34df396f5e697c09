#pragma once

#include "lambo/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lambo {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  /// Scratch directory for trace files written by the experiment checks.
  std::filesystem::path scratch = std::filesystem::temp_directory_path() / "lambo-verify";
  std::ostream* log = nullptr;  // progress lines, may be null
};

/// Experiment settings used by the comparative checks (7, 8, 9).
ExperimentConfig acceptance_experiment(int criterion, std::uint64_t seed);

/// Runs the requested checks in ascending order. Checks 6 and 12 reuse the
/// traces produced by 7-9 when those are requested in the same call.
std::vector<CriterionResult> run_verification(const std::vector<int>& ids, const VerifyOptions& opts);

/// Every check id, 1..12.
std::vector<int> all_criteria();
/// Checks that finish in seconds (no comparative experiments).
std::vector<int> quick_criteria();

std::string format_result(const CriterionResult& r);

}  // namespace lambo
