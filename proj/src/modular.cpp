#include "lambo/modular.hpp"

#include "lambo/errors.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <numeric>

namespace lambo {

ModularPoint ModularPoint::from_flat(const Vector& x, std::span<const int> split) {
  const int total = std::accumulate(split.begin(), split.end(), 0);
  if (total != x.size())
    throw InvalidInput("ModularPoint: split sums to " + std::to_string(total) + " but point has " +
                       std::to_string(x.size()) + " coordinates");
  ModularPoint p;
  int offset = 0;
  for (int d : split) {
    p.blocks.emplace_back(x.segment(offset, d));
    offset += d;
  }
  return p;
}

Vector ModularPoint::flatten() const {
  Vector x(dim());
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    x.segment(offset, b.size()) = b;
    offset += b.size();
  }
  return x;
}

int ModularPoint::dim() const {
  Eigen::Index d = 0;
  for (const auto& b : blocks) d += b.size();
  return static_cast<int>(d);
}

bool same_block(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         (a.size() == 0 || std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0);
}

bool operator==(const ModularPoint& a, const ModularPoint& b) {
  if (a.blocks.size() != b.blocks.size()) return false;
  for (std::size_t m = 0; m < a.blocks.size(); ++m)
    if (!same_block(a.blocks[m], b.blocks[m])) return false;
  return true;
}

double CostModel::total() const { return std::accumulate(costs.begin(), costs.end(), 0.0); }

double CostModel::min_positive() const {
  double best = std::numeric_limits<double>::infinity();
  for (double c : costs)
    if (c > 0.0) best = std::min(best, c);
  return std::isfinite(best) ? best : 1.0;
}

std::optional<std::size_t> first_changed_block(const ModularPoint& now, const ModularPoint& prev) {
  if (now.blocks.size() != prev.blocks.size()) throw InvalidInput("first_changed_block: shape mismatch");
  for (std::size_t m = 0; m < now.blocks.size(); ++m) {
    if (now.blocks[m].size() != prev.blocks[m].size())
      throw InvalidInput("first_changed_block: block " + std::to_string(m) + " shape mismatch");
    if (!same_block(now.blocks[m], prev.blocks[m])) return m;
  }
  return std::nullopt;
}

double movement_cost(const ModularPoint& now, const ModularPoint& prev, const CostModel& cm) {
  if (now.blocks.size() != prev.blocks.size())
    throw InvalidInput("movement_cost: points have different module counts");
  if (cm.costs.size() + 1 != now.blocks.size())
    throw InvalidInput("movement_cost: expected " + std::to_string(now.blocks.size() - 1) +
                       " module costs, got " + std::to_string(cm.costs.size()));
  const auto first = first_changed_block(now, prev);
  if (!first) return 0.0;
  double gamma = 0.0;
  // Prefix 1..m differs for every m at or after the first changed block.
  for (std::size_t m = *first; m < cm.costs.size(); ++m) gamma += cm.costs[m];
  return gamma;
}

std::vector<Box> split_box(const Box& domain, std::span<const int> split) {
  const int total = std::accumulate(split.begin(), split.end(), 0);
  if (total != domain.dim()) throw InvalidInput("split_box: split does not match domain dimension");
  std::vector<Box> out;
  int offset = 0;
  for (int d : split) {
    if (d <= 0) throw InvalidInput("split_box: module dimensions must be positive");
    out.emplace_back(domain.lo.segment(offset, d), domain.hi.segment(offset, d));
    offset += d;
  }
  return out;
}

}  // namespace lambo
