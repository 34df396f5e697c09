#pragma once

#include "lambo/box.hpp"

#include <optional>
#include <span>
#include <vector>

namespace lambo {

/// Full variable assignment split into per-module blocks x = (x_1, ..., x_N).
struct ModularPoint {
  std::vector<Vector> blocks;

  static ModularPoint from_flat(const Vector& x, std::span<const int> split);
  Vector flatten() const;
  int dim() const;
  std::size_t num_modules() const { return blocks.size(); }

  friend bool operator==(const ModularPoint& a, const ModularPoint& b);
};

/// Exact (bitwise) equality of two blocks.
bool same_block(const Vector& a, const Vector& b);

/// Re-run costs c_1..c_{N-1} of the partitioned modules plus the trade-off
/// weight between objective value and cost. The last module is free.
struct CostModel {
  std::vector<double> costs;
  double lambda = 0.1;

  double total() const;
  /// Smallest positive cost; used as the EI-per-cost denominator floor.
  double min_positive() const;
};

/// sum_m c_m * 1{blocks 1..m differ}, over the N-1 costed modules.
double movement_cost(const ModularPoint& now, const ModularPoint& prev, const CostModel& cm);

/// Index of the first block that differs, if any.
std::optional<std::size_t> first_changed_block(const ModularPoint& now, const ModularPoint& prev);

/// Per-module boxes cut from a full domain by a dimension split.
std::vector<Box> split_box(const Box& domain, std::span<const int> split);

}  // namespace lambo
