#pragma once

#include "lambo/box.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace lambo {

struct TraceRecord {
  long t = 0;      // initialization records use t <= 0
  long arm = -1;   // -1 when the method has no arm structure
  int level = -1;  // h_t; -1 when not applicable
  Vector x;
  double y = 0.0;
  double f_true = 0.0;
  double gamma = 0.0;
  double cum_cost = 0.0;
  double simple_regret = 0.0;  // f(x_t) - f*
  double cum_regret_plus = 0.0;
  int changed_module = -1;  // first block that moved (0-based); -1 when none did
};

struct RunTrace {
  std::string method;
  long run_id = 0;
  std::uint64_t seed = 0;
  long horizon = 0;
  double lambda = 0.0;
  long init_records = 0;  // leading records with t <= 0
  double init_cost = 0.0;
  double f_star = 0.0;
  bool f_star_registered = true;  // false: f* is the best value ever observed
  std::vector<TraceRecord> records;
  std::vector<std::pair<std::string, std::string>> config;
  std::string error;  // non-empty when the run stopped on an exception

  // Bandit diagnostics; zero for methods without a bandit.
  long zero_mass_fallbacks = 0;
  long unguarded_updates = 0;
  long depth_increments = 0;
  long refinements = 0;
  long discarded_arms = 0;
  long final_arms = 0;

  /// Records with t >= 1.
  long iterations() const { return static_cast<long>(records.size()) - init_records; }
  /// Record for iteration t (t may be <= 0 for initialization records).
  const TraceRecord& at(long t) const;
};

/// Append a record, filling the cumulative columns from the previous one.
void push_record(RunTrace& trace, TraceRecord rec);

/// min over records up to and including iteration t of simple regret.
double incumbent_regret(const RunTrace& trace, long t);

/// Best simple regret among records whose cumulative cost is <= budget.
/// Without `with_init` the cost axis starts after initialization, so the
/// initial design is always affordable.
/// Returns +inf when no record fits the budget.
double incumbent_regret_at_cost(const RunTrace& trace, double budget, bool with_init = true);

/// Iterations 1..t in which `module` (0-based) changed its block.
long module_switches(const RunTrace& trace, int module, long t);

/// Checks cumulative bookkeeping: cost and R^+ recurrences, the R^+
/// decomposition to 1e-12 (relative), and monotone cumulative cost.
/// Returns an empty string when all hold, else a description.
std::string check_trace_invariants(const RunTrace& trace);

std::string trace_csv_header(int dim);
void write_trace_csv(std::ostream& os, const RunTrace& trace);
/// Parse a CSV produced by write_trace_csv (only the columns are restored).
RunTrace read_trace_csv(std::istream& is);

/// %.17g rendering used for every floating-point output.
std::string format_double(double v);

}  // namespace lambo
