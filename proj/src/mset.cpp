#include "lambo/mset.hpp"

#include "lambo/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace lambo {

std::size_t Partition::locate(const Eigen::Ref<const Vector>& x) const {
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (cells[c].contains(x)) return c;
  return cells.size();
}

Partition whole_partition(int module, const Box& space) { return Partition{module, {space}}; }

std::pair<Box, Box> bisect(const Box& cell, int coord) {
  if (coord < 0 || coord >= cell.dim()) throw InvalidInput("bisect: coordinate out of range");
  const double mid = 0.5 * (cell.lo[coord] + cell.hi[coord]);
  Box lower = cell, upper = cell;
  lower.hi[coord] = mid;
  upper.lo[coord] = mid;
  return {std::move(lower), std::move(upper)};
}

Partition refine_partition(const Partition& p, std::size_t cell) {
  if (cell >= p.cells.size()) throw InvalidInput("refine_partition: no cell " + std::to_string(cell));
  const Box& c = p.cells[cell];
  int coord = 0;
  const Vector w = c.width();
  for (int j = 1; j < c.dim(); ++j)
    if (w[j] > w[coord]) coord = j;
  auto [lower, upper] = bisect(c, coord);
  Partition out = p;
  out.cells[cell] = std::move(lower);
  out.cells.insert(out.cells.begin() + static_cast<std::ptrdiff_t>(cell) + 1, std::move(upper));
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::size_t>& Mset::arm_cells(ArmId arm) const {
  if (arm >= arm_cells_.size()) throw InvalidInput("unknown arm " + std::to_string(arm));
  return arm_cells_[arm];
}

ArmId Mset::arm_of(std::span<const std::size_t> cells) const {
  if (cells.size() != partitions_.size()) throw InvalidInput("arm_of: wrong tuple length");
  ArmId id = 0;
  for (std::size_t m = 0; m < cells.size(); ++m) {
    if (cells[m] >= partitions_[m].cells.size()) throw InvalidInput("arm_of: cell out of range");
    id = id * partitions_[m].cells.size() + cells[m];
  }
  return id;
}

int Mset::ancestor(ArmId arm, int h) const {
  if (arm >= arm_cells_.size()) throw InvalidInput("unknown arm " + std::to_string(arm));
  if (h < 0 || h > height_)
    throw InvalidInput("level " + std::to_string(h) + " outside [0, " + std::to_string(height_) + "]");
  return ancestors_[arm][static_cast<std::size_t>(h)];
}

std::string Mset::describe() const {
  std::ostringstream os;
  os << "mset height=" << height_ << " modules=" << partitions_.size() << " arms=" << num_arms() << '\n';
  os << "depths";
  for (int d : depths_) os << ' ' << d;
  os << '\n';
  for (std::size_t m = 0; m < partitions_.size(); ++m) {
    os << "partition module=" << m << " cells=" << partitions_[m].cells.size() << '\n';
    for (std::size_t c = 0; c < partitions_[m].cells.size(); ++c)
      os << "  cell " << c << ' ' << partitions_[m].cells[c].to_string() << '\n';
  }
  // Depth-first listing, two spaces of indentation per tree level.
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    os << std::string(static_cast<std::size_t>(2 * (height_ - n.level)), ' ') << "node " << id
       << " level=" << n.level << " parent=" << n.parent << " module=" << n.module
       << " cell=" << n.cell;
    if (n.children.empty()) os << " arm=" << n.first_leaf;
    os << '\n';
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return os.str();
}

Mset construct_mset(std::vector<Partition> partitions, std::vector<int> depths) {
  if (partitions.size() != depths.size())
    throw InvalidInput("construct_mset: " + std::to_string(partitions.size()) + " partitions but " +
                       std::to_string(depths.size()) + " depths");
  for (std::size_t m = 0; m < partitions.size(); ++m) {
    const auto cells = partitions[m].cells.size();
    if (cells == 0) throw InvalidInput("construct_mset: module " + std::to_string(m) + " has no cells");
    if (depths[m] < 0) throw InvalidInput("construct_mset: negative depth for module " + std::to_string(m));
    if (depths[m] < 62 && (std::size_t{1} << depths[m]) < cells)
      throw InvalidInput("construct_mset: depth " + std::to_string(depths[m]) + " of module " +
                         std::to_string(m) + " too small for " + std::to_string(cells) + " cells");
    partitions[m].module = static_cast<int>(m);
  }

  Mset t;
  t.height_ = std::accumulate(depths.begin(), depths.end(), 0);
  t.fork_levels_.resize(depths.size());
  {
    int level = t.height_;
    for (std::size_t m = 0; m < depths.size(); ++m) {
      t.fork_levels_[m] = level;
      level -= depths[m];
    }
  }
  t.partitions_ = std::move(partitions);
  t.depths_ = std::move(depths);

  auto& nodes = t.nodes_;
  nodes.push_back(Mset::Node{t.height_, -1, -1, -1, {}, 0, 0});
  auto add_child = [&nodes](int parent, int module, int cell) {
    Mset::Node n;
    n.level = nodes[static_cast<std::size_t>(parent)].level - 1;
    n.parent = parent;
    n.module = module;
    n.cell = cell;
    nodes.push_back(n);
    const int id = static_cast<int>(nodes.size()) - 1;
    nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
  };

  std::vector<std::size_t> prefix;
  // Depth-first expansion; leaves come out in lexicographic cell order.
  auto expand = [&](auto&& self, int node, std::size_t m) -> void {
    if (m == t.partitions_.size()) {
      nodes[static_cast<std::size_t>(node)].first_leaf = t.arm_cells_.size();
      nodes[static_cast<std::size_t>(node)].end_leaf = t.arm_cells_.size() + 1;
      t.arm_cells_.push_back(prefix);
      t.leaf_node_.push_back(node);
      return;
    }
    const int d = t.depths_[m];
    const std::size_t cells = t.partitions_[m].cells.size();
    if (d == 0) {
      prefix.push_back(0);
      self(self, node, m + 1);
      prefix.pop_back();
      return;
    }
    for (std::size_t c = 0; c < cells; ++c) {
      int cur = add_child(node, static_cast<int>(m), static_cast<int>(c));
      for (int k = 1; k < d; ++k) cur = add_child(cur, static_cast<int>(m), -1);
      prefix.push_back(c);
      self(self, cur, m + 1);
      prefix.pop_back();
    }
  };
  expand(expand, 0, 0);

  // Leaf ranges bottom-up: children always have larger ids than parents.
  for (std::size_t id = nodes.size(); id-- > 0;) {
    auto& n = nodes[id];
    if (n.children.empty()) continue;
    n.first_leaf = nodes[static_cast<std::size_t>(n.children.front())].first_leaf;
    n.end_leaf = nodes[static_cast<std::size_t>(n.children.back())].end_leaf;
  }

  t.ancestors_.assign(t.arm_cells_.size(), std::vector<int>(static_cast<std::size_t>(t.height_) + 1, -1));
  for (std::size_t a = 0; a < t.arm_cells_.size(); ++a) {
    int id = t.leaf_node_[a];
    while (id >= 0) {
      const auto& n = nodes[static_cast<std::size_t>(id)];
      t.ancestors_[a][static_cast<std::size_t>(n.level)] = id;
      id = n.parent;
    }
  }
  return t;
}

DepthSchedule depth_from_costs(std::span<const double> costs, double lambda, long horizon,
                               std::size_t num_leaves) {
  if (costs.empty()) throw InvalidInput("depth_from_costs: need at least one module cost");
  for (double c : costs)
    if (!(c > 0.0)) throw InvalidInput("depth_from_costs: costs must be positive");
  if (!(lambda > 0.0)) throw InvalidInput("depth_from_costs: lambda must be positive");
  if (horizon < 1) throw InvalidInput("depth_from_costs: horizon must be positive");
  if (num_leaves < 2) throw InvalidInput("depth_from_costs: need at least two leaves");

  const std::size_t n = costs.size();
  const double total = std::accumulate(costs.begin(), costs.end(), 0.0);
  DepthSchedule out;
  out.depths.assign(n, 0);
  int assigned = 0;
  for (std::size_t m = 0; m + 1 < n; ++m) {
    const double tail = std::accumulate(costs.begin() + static_cast<std::ptrdiff_t>(m) + 1, costs.end(), 0.0);
    const double level = std::floor(-std::log2(tail / total) - std::log2(lambda) / 2.0);
    int d = static_cast<int>(level) - assigned;
    if (d < 0) {
      d = 0;
      out.clamped = true;
    }
    out.depths[m] = d;
    assigned += d;
  }
  const double last = std::floor(std::log2(std::cbrt(static_cast<double>(horizon)) /
                                           std::log2(static_cast<double>(num_leaves))));
  const int d_last = static_cast<int>(last) - assigned;
  if (d_last < 0)
    throw HorizonTooSmall("depth_from_costs: horizon " + std::to_string(horizon) +
                          " too small; last-module depth would be " + std::to_string(d_last));
  out.depths[n - 1] = d_last;
  return out;
}

int lca_level(const Mset& t, ArmId i, ArmId j) {
  if (i >= t.num_arms() || j >= t.num_arms())
    throw InvalidInput("lca_level: unknown arm " + std::to_string(std::max(i, j)));
  for (int h = 0; h <= t.height(); ++h)
    if (t.ancestor(i, h) == t.ancestor(j, h)) return h;
  return t.height();
}

double hst_distance(const Mset& t, std::span<const double> costs, double lambda, ArmId i, ArmId j) {
  const int level = lca_level(t, i, j);
  if (i == j) return 0.0;
  const double total = std::accumulate(costs.begin(), costs.end(), 0.0);
  return std::sqrt(lambda) * total * std::ldexp(1.0, level - t.height());
}

std::vector<ArmId> subtree_arms(const Mset& t, ArmId i, int h) {
  const auto& n = t.nodes()[static_cast<std::size_t>(t.ancestor(i, h))];
  std::vector<ArmId> out(n.end_leaf - n.first_leaf);
  std::iota(out.begin(), out.end(), n.first_leaf);
  return out;
}

}  // namespace lambo
