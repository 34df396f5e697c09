#pragma once

#include "lambo/box.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lambo {

using ArmId = std::size_t;

/// Variable space of one pipeline stage and the cost of re-running it.
struct ModuleSpace {
  Box box;
  double cost = 0.0;
  int dim() const { return box.dim(); }
};

/// Axis-aligned partition of one module's box. Cells are closed boxes whose
/// interiors are pairwise disjoint.
struct Partition {
  int module = 0;  // zero-based
  std::vector<Box> cells;

  /// Index of the first cell containing x, or cells.size() when none does.
  std::size_t locate(const Eigen::Ref<const Vector>& x) const;
};

/// Single-cell partition covering the whole module box.
Partition whole_partition(int module, const Box& space);

/// Split one box at the midpoint of the given coordinate.
std::pair<Box, Box> bisect(const Box& cell, int coord);

/// Replace cell `cell` by its two halves split at the midpoint of its longest
/// edge (ties go to the lowest coordinate). The lower half keeps the index,
/// the upper half is inserted right after it.
Partition refine_partition(const Partition& p, std::size_t cell);

/// Modular structure embedding tree.
///
/// Levels count upward from the leaves (level 0) to the root (level H). The
/// section for module m spans d_m levels; its cells fork at the top of the
/// section and each branch is padded with a unary chain down to the section
/// bottom, so every leaf sits at depth H and two arms whose first differing
/// module is m meet exactly at the top of that section. Leaves are ordered
/// lexicographically by their cell tuple, module 0 most significant.
class Mset {
 public:
  struct Node {
    int level = 0;
    int parent = -1;
    int module = -1;  // section this node belongs to; -1 for the root
    int cell = -1;    // cell chosen when this node is a fork child
    std::vector<int> children;
    std::size_t first_leaf = 0;  // leaves below are [first_leaf, end_leaf)
    std::size_t end_leaf = 0;
  };

  std::size_t num_arms() const { return arm_cells_.size(); }
  std::size_t num_modules() const { return partitions_.size(); }
  int height() const { return height_; }
  const std::vector<int>& depths() const { return depths_; }
  const std::vector<Partition>& partitions() const { return partitions_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Cell index of `arm` in every partitioned module.
  const std::vector<std::size_t>& arm_cells(ArmId arm) const;
  /// Arm id for a cell tuple.
  ArmId arm_of(std::span<const std::size_t> cells) const;
  /// Node id of the level-h ancestor of a leaf.
  int ancestor(ArmId arm, int h) const;
  /// Level at which module m's cells fork (top of its section).
  int fork_level(int module) const { return fork_levels_[module]; }

  /// Nested text rendering; format documented in docs/mset_format.md.
  std::string describe() const;

 private:
  friend Mset construct_mset(std::vector<Partition> partitions, std::vector<int> depths);

  std::vector<Partition> partitions_;
  std::vector<int> depths_;
  std::vector<int> fork_levels_;
  int height_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> arm_cells_;
  std::vector<std::vector<int>> ancestors_;  // [arm][level]
  std::vector<int> leaf_node_;
};

/// Builds the tree. Requires 2^{d_m} >= |P_m| for every module.
Mset construct_mset(std::vector<Partition> partitions, std::vector<int> depths);

struct DepthSchedule {
  std::vector<int> depths;
  bool clamped = false;  // some intermediate depth was negative and set to 0
};

/// Depth parameters from module costs so the HST metric dominates the
/// movement cost; the last module absorbs the horizon-dependent remainder
/// floor(log2(T^{1/3} / log2|K|)). Base-2 logarithms throughout.
DepthSchedule depth_from_costs(std::span<const double> costs, double lambda, long horizon,
                               std::size_t num_leaves);

/// Level of the least common ancestor (leaves are level 0).
int lca_level(const Mset& t, ArmId i, ArmId j);

/// sqrt(lambda) * sum(costs) * 2^{lca level} / 2^H; zero for identical arms.
double hst_distance(const Mset& t, std::span<const double> costs, double lambda, ArmId i, ArmId j);

/// Leaves of the level-h subtree containing arm i, in ascending order.
std::vector<ArmId> subtree_arms(const Mset& t, ArmId i, int h);

}  // namespace lambo
