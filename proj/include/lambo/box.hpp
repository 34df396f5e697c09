#pragma once

#include <Eigen/Core>

#include <string>

namespace lambo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Closed axis-aligned box [lo, hi]. Degenerate edges (lo == hi) are allowed.
struct Box {
  Vector lo;
  Vector hi;

  Box() = default;
  Box(Vector lo_, Vector hi_);
  static Box uniform(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo.size()); }
  bool empty() const;
  bool contains(const Eigen::Ref<const Vector>& x) const;
  Vector width() const { return hi - lo; }
  /// Number of edges with hi > lo.
  int free_dims() const;
  std::string to_string() const;

  friend bool operator==(const Box& a, const Box& b) { return a.lo == b.lo && a.hi == b.hi; }
};

}  // namespace lambo
