#pragma once

#include "lambo/mset.hpp"
#include "lambo/rng.hpp"

#include <memory>
#include <span>
#include <vector>

namespace lambo {

/// Slowly-moving-bandit state over the leaves of an MSET.
struct SmbState {
  std::shared_ptr<const Mset> tree;
  std::vector<double> p;  // arm probabilities; zero marks a discarded arm
  double eta = 1.0;
  ArmId prev_arm = 0;
  int prev_level = 0;
  Rng rng;
  long zero_mass_fallbacks = 0;
  long unguarded_updates = 0;  // updates where eta > 2^-H, so the -1/eta floor is not guaranteed
};

/// Uniform p over all leaves, h_0 = H and i_0 drawn from p.
SmbState make_smb(std::shared_ptr<const Mset> tree, double eta, Rng rng);

/// Learning rate sqrt(2^-H log|K| / T) from the regret analysis.
double theoretical_learning_rate(const Mset& tree, long horizon);

/// Draw i_t from p restricted to A_{h_{t-1}}(i_{t-1}). Falls back to uniform
/// over that subtree when it carries no mass.
ArmId sample_arm(SmbState& s);

struct LevelDraw {
  std::vector<int> sigmas;  // sigma_{t,0..H-1}, each +1 or -1; sigma_{t,H} = -1 implicitly
  int level = 0;            // h_t: least h with sigma_{t,h} = -1
};

LevelDraw draw_levels(SmbState& s);

struct LossEstimate {
  std::vector<std::vector<double>> levels;  // levels[h][i] = lbar_{t,h}(i), h = 0..H
  std::vector<double> ltilde;
};

/// Recursive soft-min loss estimator over subtrees. Subtree aggregates are
/// log-sum-exp stabilized and kept inside [min, max] of their inputs, which
/// the exact soft-min always satisfies.
LossEstimate loss_estimator(const SmbState& s, std::span<const double> base, const LevelDraw& draw);

/// True when 0 <= lbar_{t,h}(i) <= prod_{j<h} (1 + sigma_{t,j}) for all h, i.
bool loss_bounds_hold(const LossEstimate& est, const LevelDraw& draw);

/// Exponential-weights update, renormalized. When eta <= 2^-H the estimator
/// is guaranteed to stay above -1/eta and any breach throws ContractViolation.
void multiplicative_update(SmbState& s, std::span<const double> ltilde);

struct DiscardResult {
  std::vector<ArmId> removed;
  bool noop = false;
};

/// Zero out arms with 0 < p < threshold (never the current arm) and
/// renormalize. No-op when no live arm reaches the threshold.
DiscardResult discard_arms(SmbState& s, double threshold);

/// Reset p to uniform over the arms that are still live.
void refresh_probabilities(SmbState& s);

struct SmbStepRecord {
  ArmId arm = 0;
  LevelDraw draw;
  LossEstimate estimate;
};

/// One full bandit round with externally supplied base losses in [0, 1].
SmbStepRecord smb_step(SmbState& s, std::span<const double> base);

}  // namespace lambo
