#include "doctest.h"

#include "lambo/errors.hpp"
#include "lambo/objectives.hpp"

#include <cmath>

using namespace lambo;

namespace {

// Scalar Hartmann-6 written out independently of the library version.
double hartmann6_scalar(const double* x) {
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double a[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                 {0.05, 10, 17, 0.1, 8, 14},
                                 {3, 3.5, 1.7, 10, 17, 8},
                                 {17, 8, 0.05, 10, 0.1, 14}};
  static const double p[4][6] = {{1312, 1696, 5569, 124, 8283, 5886},
                                 {2329, 4135, 8307, 3736, 1004, 9991},
                                 {2348, 1451, 3522, 2883, 3047, 6650},
                                 {4047, 8828, 8732, 5743, 1091, 381}};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x[j] - p[i][j] * 1e-4;
      inner += a[i][j] * d * d;
    }
    total -= alpha[i] * std::exp(-inner);
  }
  return total;
}

Vector filled(int n, double v) { return Vector::Constant(n, v); }

}  // namespace

TEST_CASE("functions vanish at the origin") {
  CHECK(ackley(filled(8, 0.0)) == 0.0);
  CHECK(rastrigin(filled(6, 0.0)) == 0.0);
  CHECK(griewank(filled(6, 0.0)) == 0.0);
}

TEST_CASE("hartmann6") {
  Vector xs(6);
  xs << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573;
  CHECK(hartmann6(xs) == doctest::Approx(-3.32237).epsilon(1e-5));

  const Vector ones = filled(6, 1.0);
  CHECK(std::abs(hartmann6(ones) - hartmann6_scalar(ones.data())) <= 1e-12);

  Rng rng(31);
  double worst_diff = 0.0, lowest = 0.0;
  for (int k = 0; k < 100000; ++k) {
    Vector x(6);
    for (int i = 0; i < 6; ++i) x[i] = uniform01(rng);
    const double v = hartmann6(x);
    lowest = std::min(lowest, v);
    if (k < 1000) worst_diff = std::max(worst_diff, std::abs(v - hartmann6_scalar(x.data())));
  }
  CHECK(lowest >= -3.32238);
  CHECK(worst_diff <= 1e-12);
}

TEST_CASE("base objectives re-verify their optimum") {
  for (FunctionId f : {FunctionId::Hartmann6, FunctionId::Ackley, FunctionId::Rastrigin, FunctionId::Griewank}) {
    const ObjectiveSpec s = base_objective(f);
    CHECK(std::abs(evaluate_raw(s, s.optimizer) - s.f_min) <= 1e-6);
    CHECK(s.f_max > s.f_min);
    CHECK(s.domain.dim() == s.dimension);
  }
  const ObjectiveSpec ack = base_objective(FunctionId::Ackley);
  CHECK(ack.dimension == 8);
  CHECK(ack.domain.lo[0] == -32.768);
  CHECK(ack.domain.hi[0] == 32.768);
  CHECK(base_objective(FunctionId::Rastrigin).domain.hi[0] == 5.12);
  CHECK(base_objective(FunctionId::Griewank).domain.hi[0] == 600.0);
}

TEST_CASE("domain checks") {
  const ObjectiveSpec h = base_objective(FunctionId::Hartmann6);
  CHECK_THROWS_AS(evaluate_raw(h, filled(6, 1.5)), InvalidInput);
  CHECK_THROWS_AS(evaluate_raw(h, filled(5, 0.5)), InvalidInput);
}

TEST_CASE("normalization") {
  const ObjectiveSpec s = base_objective(FunctionId::Rastrigin);
  CHECK(normalize(s, s.f_min) == 0.0);
  CHECK(normalize(s, s.f_max) == doctest::Approx(1.0));
  CHECK(normalize(s, 0.5 * (s.f_min + s.f_max)) == doctest::Approx(0.5));
  CHECK(registered_optimum(s) == 0.0);

  ObjectiveSpec flat = s;
  flat.f_max = flat.f_min;
  CHECK(normalize(flat, 3.0) == 0.5);

  // Monotone map: ranking of raw values is preserved.
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    Vector a(6), b(6);
    for (int i = 0; i < 6; ++i) a[i] = -5.12 + 10.24 * uniform01(rng), b[i] = -5.12 + 10.24 * uniform01(rng);
    CHECK((evaluate_raw(s, a) < evaluate_raw(s, b)) == (true_value(s, a) < true_value(s, b)));
  }
}

TEST_CASE("noise injection") {
  ObjectiveSpec s = base_objective(FunctionId::Griewank);
  const Vector x = filled(6, 12.5);
  const double truth = true_value(s, x);
  Rng rng(77);
  const int n = 100000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += evaluate(s, x, rng);
  CHECK(std::abs(acc / n - truth) <= 3.0 * 0.01 / std::sqrt(static_cast<double>(n)));

  s.noise_std = 0.0;
  CHECK(evaluate(s, x, rng) == truth);
}

TEST_CASE("presets") {
  const Preset& h = preset("hartmann-2mod-10:1");
  CHECK(h.objective.dimension == 6);
  CHECK(h.objective.split == std::vector<int>{3, 3});
  CHECK(h.cost_model().costs == std::vector<double>{10.0});
  CHECK(h.lambda == 0.1);
  CHECK(h.objective.noise_std == 0.01);

  const Preset& a3 = preset("ackley-3mod");
  CHECK(a3.objective.split == std::vector<int>{2, 2, 4});
  CHECK(a3.cost_model().costs == std::vector<double>{40.0, 10.0});
  CHECK(a3.module_costs.back() == 1.0);

  CHECK(preset("ackley-split-2-6").objective.split == std::vector<int>{2, 6});
  CHECK(preset("griewank-2mod-10:1").objective.split == std::vector<int>{4, 2});
  CHECK(preset("ackley-2mod-10:1").objective.split == std::vector<int>{6, 2});
  CHECK(preset("hartmann-2mod-1:1").cost_model().costs == std::vector<double>{1.0});

  try {
    preset("no-such-preset");
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("hartmann-2mod-10:1") != std::string::npos);
  }

  for (const Preset& p : preset_table()) {
    int total = 0;
    for (int d : p.objective.split) total += d;
    CHECK(total == p.objective.dimension);
    CHECK(p.module_boxes().size() == p.objective.split.size());
  }
}

TEST_CASE("seed partitions bisect each costed module once") {
  const Preset& p = preset("ackley-3mod");
  Rng rng(3);
  const auto parts = seed_partitions(p, rng);
  REQUIRE(parts.size() == 2);
  const auto boxes = p.module_boxes();
  for (std::size_t m = 0; m < parts.size(); ++m) {
    REQUIRE(parts[m].cells.size() == 2);
    int split_coords = 0;
    for (int i = 0; i < boxes[m].dim(); ++i) {
      CHECK(parts[m].cells[0].lo[i] == boxes[m].lo[i]);
      CHECK(parts[m].cells[1].hi[i] == boxes[m].hi[i]);
      if (parts[m].cells[0].hi[i] != boxes[m].hi[i]) {
        ++split_coords;
        CHECK(parts[m].cells[0].hi[i] == 0.5 * (boxes[m].lo[i] + boxes[m].hi[i]));
      }
    }
    CHECK(split_coords == 1);
  }
}
