#pragma once

#include "lambo/modular.hpp"
#include "lambo/mset.hpp"
#include "lambo/objectives.hpp"
#include "lambo/smb.hpp"
#include "lambo/surrogate.hpp"
#include "lambo/trace.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lambo {

enum class DepthMode { FixedOne, CostDerived };

std::string to_string(DepthMode m);
DepthMode depth_mode_from_string(const std::string& s);

struct Heuristics {
  bool restart = true;       // refresh p every restart epoch
  bool discard = true;       // drop low-probability arms at each restart
  bool refine = true;        // bisect surviving cells after discarding
  bool depth_growth = true;  // deepen frequently switching modules
  bool refit = true;         // periodic kernel refits
};

struct LamboConfig {
  long horizon = 300;
  /// Learning rate; <= 0 selects the theoretical rate for the initial tree.
  double eta = 1.0;
  int initial_samples = 15;
  int restart_epoch = 25;
  int depth_growth_period = 20;
  double switch_threshold = 0.5;
  double discard_factor = 0.2;
  int max_refinements = 2;
  DepthMode depth_mode = DepthMode::FixedOne;
  /// Base losses for every live arm each round; false feeds back only the
  /// chosen arm's value and reuses the last known loss for the others.
  bool full_information = true;
  Heuristics heuristics;
  ModelConfig model;

  /// Throws InvalidInput on out-of-range settings.
  void validate() const;
};

/// Objective, its module decomposition and the movement-cost model.
struct Problem {
  ObjectiveSpec objective;
  CostModel costs;
  std::vector<Box> modules;

  std::size_t num_modules() const { return modules.size(); }
};

Problem make_problem(const Preset& p);

/// Fixed stream labels used with derive_seed.
enum class Stream : std::uint64_t { Init = 0x1417, Bandit = 1, Solver = 2, Noise = 3 };
enum class MethodId : std::uint64_t { Lambo = 0, GpUcb = 1, GpEi = 2, Random = 3, EiPerCost = 4 };

std::string to_string(MethodId m);
MethodId method_from_string(const std::string& s);

/// Stream for the initial design; shared by all methods of one run index so
/// every method starts from the same points.
std::uint64_t init_seed(std::uint64_t master, long run_id);
std::uint64_t method_seed(std::uint64_t master, MethodId method, long run_id, Stream s);

/// Least module whose cell differs between two arms of the same tree.
std::optional<std::size_t> first_differing_module(const Mset& tree, ArmId now, ArmId prev);

/// Box whose first `m` modules are pinned to `prev`, whose partitioned
/// modules m..N-2 are the arm's cells, and whose last module is free.
Box lazy_region(const Mset& tree, const std::vector<Box>& modules, ArmId arm, const ModularPoint* prev,
                std::size_t m);

struct LazyCandidate {
  double acquisition = 0.0;
  ModularPoint point;
  std::size_t module = 0;  // m: first block allowed to move
};

/// Minimizes the acquisition over the arm's lazy region. Without a previous
/// point every block is free.
LazyCandidate lazy_base_loss(const GaussianProcess& gp, const ModelConfig& model, const Mset& tree,
                             const std::vector<Box>& modules, ArmId arm, ArmId prev_arm,
                             const ModularPoint* x_prev, long t, Rng& rng);

/// Affine map of acquisition values onto [0, 1] using their min and max;
/// constant input maps to 0.5.
std::vector<double> normalize_base_losses(std::span<const double> values);
/// Same map with an explicit range; values outside [lo, hi] are clamped.
std::vector<double> normalize_base_losses(std::span<const double> values, double lo, double hi);

/// Draw `count` uniform points over the full domain with noisy evaluations,
/// charging each the full cost (as if module 1 changed). Records use
/// t = 1 - count .. 0.
struct InitialDesign {
  std::vector<Vector> points;
  std::vector<double> values;
};
InitialDesign initial_design(const Problem& problem, int count, std::uint64_t seed);

/// One LaMBO run. Owns all mutable state; not shared across threads.
class LamboRun {
 public:
  LamboRun(LamboConfig cfg, Problem problem, std::vector<Partition> partitions, std::uint64_t master_seed,
           long run_id);

  long iteration() const { return t_; }
  /// One iteration of the main loop plus any scheduled heuristics.
  void step();
  void run_to_horizon();

  const RunTrace& trace() const { return trace_; }
  RunTrace take_trace();
  const SmbState& bandit() const { return smb_; }
  const Mset& tree() const { return *tree_; }
  const Surrogate& surrogate() const { return model_; }
  const std::optional<ModularPoint>& last_point() const { return x_prev_; }

 private:
  /// Evaluate the initial design and seed the GP.
  void initialize();
  void rebuild_tree(std::vector<Partition> parts, std::vector<int> depths, const std::vector<double>& old_p);
  void grow_depths();
  void track_range(double v);
  void restart();
  std::vector<int> initial_depths(const std::vector<Partition>& parts) const;

  LamboConfig cfg_;
  Problem problem_;
  std::uint64_t master_seed_;
  long run_id_;
  std::shared_ptr<const Mset> tree_;
  SmbState smb_;
  Surrogate model_;
  Rng solver_rng_;
  Rng noise_rng_;
  std::optional<ModularPoint> x_prev_;
  std::vector<double> last_loss_;  // bandit-feedback mode only
  double run_min_ = 0.0, run_max_ = 0.0;  // acquisition values seen so far
  bool have_range_ = false;
  long t_ = 0;
  int refinements_ = 0;
  std::vector<long> window_switches_;  // per partitioned module, current growth window
  RunTrace trace_;
};

/// Convenience wrapper: construct, run T iterations, return the trace.
RunTrace run_lambo(const LamboConfig& cfg, const Problem& problem, std::vector<Partition> partitions,
                   std::uint64_t master_seed, long run_id);

}  // namespace lambo
