#include "doctest.h"

#include "lambo/errors.hpp"
#include "lambo/mset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace lambo;

namespace {

Partition cells_1d(int module, int count) {
  Partition p;
  p.module = module;
  for (int i = 0; i < count; ++i) {
    Vector lo(1), hi(1);
    lo[0] = static_cast<double>(i) / count;
    hi[0] = static_cast<double>(i + 1) / count;
    p.cells.emplace_back(lo, hi);
  }
  return p;
}

Mset tree_of(std::vector<int> counts, std::vector<int> depths) {
  std::vector<Partition> parts;
  for (std::size_t m = 0; m < counts.size(); ++m) parts.push_back(cells_1d(static_cast<int>(m), counts[m]));
  return construct_mset(std::move(parts), std::move(depths));
}

// Depth of a node measured from the root.
int depth_of(const Mset& t, int node) {
  int d = 0;
  while (t.nodes()[node].parent >= 0) node = t.nodes()[node].parent, ++d;
  return d;
}

}  // namespace

TEST_CASE("construct_mset shapes") {
  SUBCASE("two modules 2 x 3") {
    const Mset t = tree_of({2, 3}, {1, 3});
    CHECK(t.num_arms() == 6);
    CHECK(t.height() == 4);
  }
  SUBCASE("single cell, depth 0") {
    const Mset t = tree_of({1}, {0});
    CHECK(t.num_arms() == 1);
    CHECK(t.height() == 0);
  }
  SUBCASE("three modules 2 x 2 x 2") {
    const Mset t = tree_of({2, 2, 2}, {1, 1, 1});
    CHECK(t.num_arms() == 8);
    CHECK(t.height() == 3);
    std::size_t a = t.arm_of(std::vector<std::size_t>{0, 1, 0});
    std::size_t b = t.arm_of(std::vector<std::size_t>{0, 1, 1});
    CHECK(lca_level(t, a, b) == 1);
  }
  SUBCASE("depth too small names the module") {
    try {
      tree_of({2, 5}, {1, 2});
      FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
      CHECK(std::string(e.what()).find("module 1") != std::string::npos);
    }
  }
}

TEST_CASE("leaves sit at uniform depth and sections span their depths") {
  const Mset t = tree_of({3, 2, 4}, {2, 3, 2});
  CHECK(t.num_arms() == 24);
  CHECK(t.height() == 7);
  for (ArmId a = 0; a < t.num_arms(); ++a) {
    const int leaf = t.ancestor(a, 0);
    CHECK(depth_of(t, leaf) == t.height());
    for (int h = 0; h <= t.height(); ++h) CHECK(t.nodes()[t.ancestor(a, h)].level == h);
  }
  // Section of module m spans [fork_level(m) - d_m, fork_level(m)].
  CHECK(t.fork_level(0) == 7);
  CHECK(t.fork_level(1) == 5);
  CHECK(t.fork_level(2) == 2);
}

TEST_CASE("lca level and subtree queries") {
  const Mset t = tree_of({2, 3}, {1, 3});
  const int h = t.height();
  for (ArmId i = 0; i < t.num_arms(); ++i) {
    CHECK(lca_level(t, i, i) == 0);
    CHECK(subtree_arms(t, i, 0) == std::vector<ArmId>{i});
    CHECK(subtree_arms(t, i, h).size() == t.num_arms());
    for (int l = 0; l < h; ++l) {
      const auto small = subtree_arms(t, i, l), big = subtree_arms(t, i, l + 1);
      CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
    }
    // At level d_2 = 3 the subtree is the 3 arms sharing module 1's cell.
    const auto same = subtree_arms(t, i, 3);
    CHECK(same.size() == 3);
    for (ArmId j : same) CHECK(t.arm_cells(j)[0] == t.arm_cells(i)[0]);
    for (ArmId j = 0; j < t.num_arms(); ++j) {
      if (t.arm_cells(i)[0] != t.arm_cells(j)[0]) CHECK(lca_level(t, i, j) == h);
      else if (i != j) {
        CHECK(lca_level(t, i, j) >= 1);
        CHECK(lca_level(t, i, j) <= 3);
      }
    }
  }
  CHECK_THROWS_AS(subtree_arms(t, 0, h + 1), InvalidInput);
  CHECK_THROWS_AS(lca_level(t, 0, 99), InvalidInput);
}

TEST_CASE("depth_from_costs") {
  {
    const std::vector<double> c{40, 10};
    const auto d = depth_from_costs(c, 1.0, 1000000, 8);
    CHECK(d.depths == std::vector<int>{2, 3});
    CHECK_FALSE(d.clamped);
  }
  {
    const std::vector<double> c{7};
    CHECK(depth_from_costs(c, 1.0, 1000000, 4).depths == std::vector<int>{5});
  }
  {
    const std::vector<double> c{1, 1};
    CHECK(depth_from_costs(c, 1.0, 1000000, 4).depths[0] == 1);
  }
  {
    const std::vector<double> c{40, 10};
    CHECK_THROWS_AS(depth_from_costs(c, 1.0, 2, 8), HorizonTooSmall);
  }
}

TEST_CASE("hst distance") {
  const Mset t = tree_of({2, 3}, {1, 3});
  const std::vector<double> c{40, 10};
  CHECK(hst_distance(t, c, 1.0, 2, 2) == 0.0);
  const ArmId a = t.arm_of(std::vector<std::size_t>{0, 0});
  const ArmId b = t.arm_of(std::vector<std::size_t>{1, 0});
  CHECK(hst_distance(t, c, 4.0, a, b) == doctest::Approx(2.0 * 50.0));

  // H = 5, LCA at level 3, lambda 1, sum 50 -> 12.5.
  const Mset t5 = tree_of({2, 8}, {2, 3});
  CHECK(t5.height() == 5);
  const ArmId u = t5.arm_of(std::vector<std::size_t>{0, 0});
  const ArmId v = t5.arm_of(std::vector<std::size_t>{0, 7});
  CHECK(lca_level(t5, u, v) == 3);
  CHECK(hst_distance(t5, c, 1.0, u, v) == doctest::Approx(12.5));
}

TEST_CASE("hst distance is an ultrametric") {
  const Mset t = tree_of({3, 2, 4}, {2, 1, 3});
  REQUIRE(t.num_arms() <= 64);
  const std::vector<double> c{5, 2, 1};
  const std::size_t n = t.num_arms();
  for (ArmId i = 0; i < n; ++i)
    for (ArmId j = 0; j < n; ++j) {
      const double dij = hst_distance(t, c, 1.0, i, j);
      CHECK(dij == hst_distance(t, c, 1.0, j, i));
      CHECK((dij == 0.0) == (i == j));
      for (ArmId k = 0; k < n; ++k)
        CHECK(std::max(hst_distance(t, c, 1.0, i, k), hst_distance(t, c, 1.0, k, j)) >= dij);
    }
}

TEST_CASE("cost-derived depths dominate the movement cost") {
  const std::vector<double> c{40, 10};
  const auto d = depth_from_costs(c, 1.0, 1000000, 8);
  const Mset t = tree_of({2, 4}, d.depths);
  for (ArmId i = 0; i < t.num_arms(); ++i)
    for (ArmId j = 0; j < t.num_arms(); ++j) {
      if (i == j) continue;
      const std::size_t m = t.arm_cells(i)[0] != t.arm_cells(j)[0] ? 0 : 1;
      const double tail = std::accumulate(c.begin() + static_cast<long>(m), c.end(), 0.0);
      CHECK(hst_distance(t, c, 1.0, i, j) >= tail);
    }
}

TEST_CASE("refine_partition") {
  Partition sq;
  sq.cells.push_back(Box::uniform(2, 0.0, 1.0));
  const Partition r = refine_partition(sq, 0);
  REQUIRE(r.cells.size() == 2);
  CHECK(r.cells[0].hi[0] == 0.5);
  CHECK(r.cells[0].hi[1] == 1.0);
  CHECK(r.cells[1].lo[0] == 0.5);

  Partition tall;
  Vector lo(2), hi(2);
  lo << 0, 0;
  hi << 1, 4;
  tall.cells.emplace_back(lo, hi);
  const Partition t2 = refine_partition(tall, 0);
  CHECK(t2.cells[0].hi[1] == 2.0);
  CHECK(t2.cells[1].lo[1] == 2.0);

  Partition p = whole_partition(0, Box::uniform(3, -1.0, 1.0));
  for (int k = 0; k < 7; ++k) p = refine_partition(p, static_cast<std::size_t>(k % p.cells.size()));
  CHECK(p.cells.size() == 8);
  double vol = 0.0;
  for (const Box& b : p.cells) vol += b.width().prod();
  CHECK(vol == doctest::Approx(8.0));
}

TEST_CASE("describe renders every node") {
  const Mset t = tree_of({2, 3}, {1, 3});
  const std::string s = t.describe();
  CHECK_FALSE(s.empty());
  CHECK(std::count(s.begin(), s.end(), '\n') >= static_cast<long>(t.nodes().size()));
}
