#pragma once

#include "lambo/engine.hpp"

namespace lambo {

struct BaselineConfig {
  MethodId method = MethodId::GpUcb;
  long horizon = 300;
  int initial_samples = 15;
  bool refit = true;
  ModelConfig model;

  void validate() const;
};

/// Expected improvement below `best` for a Gaussian posterior N(mean, sd^2).
double expected_improvement(double mean, double sd, double best);
double ei_acquisition(const GaussianProcess& gp, const Vector& x, double best);

/// EI divided by (kappa + movement cost from x_prev), kappa the smallest
/// positive module cost.
double ei_per_cost(const GaussianProcess& gp, const Vector& x, double best, const ModularPoint& x_prev,
                   const CostModel& cm, std::span<const int> split);

/// Standard BO loop (fit, optimize the acquisition over the full space,
/// evaluate, update) with LaMBO's cost accounting and initial design.
RunTrace run_baseline(const BaselineConfig& cfg, const Problem& problem, std::uint64_t master_seed, long run_id);

}  // namespace lambo
