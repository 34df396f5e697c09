#include "doctest.h"

#include "lambo/errors.hpp"
#include "lambo/gp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace lambo;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix random_points(int dim, int n, Rng& rng) {
  Matrix x(dim, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < dim; ++i) x(i, j) = uniform01(rng);
  return x;
}

// Posterior from an explicit inverse; shares nothing with the Cholesky path.
struct NaivePosterior {
  double mean, var;
};

NaivePosterior naive_posterior(double w, double noise, const Matrix& x, const Vector& y, const Vector& q) {
  const auto k = [w](const Vector& a, const Vector& b) { return std::exp(-(a - b).squaredNorm() / (w * w)); };
  const Eigen::Index n = x.cols();
  Matrix gram(n, n);
  Vector kq(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kq[i] = k(x.col(i), q);
    for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = k(x.col(i), x.col(j));
  }
  gram.diagonal().array() += noise;
  const Matrix inv = gram.inverse();
  return {kq.dot(inv * y), 1.0 - kq.dot(inv * kq)};
}

}  // namespace

TEST_CASE("kernel values") {
  const Kernel se = Kernel::squared_exponential(1.0);
  CHECK(kernel_eval(se, vec({0.3}), vec({0.3})) == doctest::Approx(1.0));
  CHECK(kernel_eval(se, vec({0.0}), vec({1.0})) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  const Kernel se2 = Kernel::squared_exponential(2.0);
  CHECK(kernel_eval(se2, vec({0, 0}), vec({2, 0})) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(kernel_eval(se, vec({0, 0}), vec({1})), InvalidInput);

  const Kernel m = Kernel::matern52(0.7, 2.5);
  CHECK(kernel_eval(m, vec({0.1, 0.2}), vec({0.1, 0.2})) == doctest::Approx(2.5));
  const double r = std::sqrt(0.5) / 0.7;
  const double expect = 2.5 * (1 + std::sqrt(5.0) * r + 5.0 * r * r / 3.0) * std::exp(-std::sqrt(5.0) * r);
  CHECK(kernel_eval(m, vec({0, 0}), vec({0.5, 0.5})) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(kernel_eval(m, vec({0.4, 0.9}), vec({0.1, 0.2})) == kernel_eval(m, vec({0.1, 0.2}), vec({0.4, 0.9})));
}

TEST_CASE("kernel matrix is symmetric positive semidefinite") {
  Rng rng(11);
  const Matrix x = random_points(3, 25, rng);
  for (const Kernel& k : {Kernel::squared_exponential(0.4), Kernel::matern52(0.4)}) {
    const Matrix g = kernel_matrix(k, x, x);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("posterior predict small cases") {
  GaussianProcess empty(Kernel::squared_exponential(1.0), 0.01);
  const Prediction p0 = empty.predict(vec({0.2, 0.4}));
  CHECK(p0.mean == 0.0);
  CHECK(p0.std == doctest::Approx(1.0));

  GaussianProcess one(Kernel::squared_exponential(1.0), 0.25);
  one.add_observation(vec({0.5}), 2.0);
  const Prediction p1 = one.predict(vec({0.5}));
  CHECK(p1.mean == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(p1.std * p1.std == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("posterior matches an explicit-inverse oracle") {
  Rng rng(5);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix x = random_points(3, 10, rng);
    Vector y(10);
    for (int i = 0; i < 10; ++i) y[i] = standard_normal(rng);
    GaussianProcess gp(Kernel::squared_exponential(0.6), 0.01);
    for (int i = 0; i < 10; ++i) gp.add_observation(x.col(i), y[i]);
    for (int q = 0; q < 5; ++q) {
      const Vector xq = random_points(3, 1, rng).col(0);
      const Prediction p = gp.predict(xq);
      const NaivePosterior o = naive_posterior(0.6, 0.01, x, y, xq);
      worst = std::max({worst, std::abs(p.mean - o.mean), std::abs(p.std * p.std - std::max(o.var, 0.0))});
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("incremental and batch data agree") {
  Rng rng(8);
  const Matrix x = random_points(2, 12, rng);
  Vector y(12);
  for (int i = 0; i < 12; ++i) y[i] = std::sin(3 * x(0, i)) + x(1, i);
  GaussianProcess inc(Kernel::matern52(0.3), 1e-3);
  for (int i = 0; i < 12; ++i) inc.add_observation(x.col(i), y[i]);
  GaussianProcess batch(Kernel::matern52(0.3), 1e-3);
  batch.reset_data(x, y);
  const Vector q = vec({0.3, 0.8});
  CHECK(inc.predict(q).mean == doctest::Approx(batch.predict(q).mean).epsilon(1e-10));
  CHECK(inc.predict(q).std == doctest::Approx(batch.predict(q).std).epsilon(1e-10));
}

TEST_CASE("posterior variance stays in range and shrinks on repeats") {
  Rng rng(3);
  GaussianProcess gp(Kernel::squared_exponential(0.3), 0.05);
  const Vector x0 = vec({0.4, 0.6});
  double last = 1.0;
  for (int k = 0; k < 6; ++k) {
    gp.add_observation(x0, 0.1 * k);
    const double v = gp.predict(x0).std;
    CHECK(v * v <= last * last + 1e-9);
    last = v;
  }
  for (int q = 0; q < 100; ++q) {
    const double s = gp.predict(random_points(2, 1, rng).col(0)).std;
    CHECK(s * s >= 0.0);
    CHECK(s * s <= 1.0 + 1e-9);
  }
}

TEST_CASE("duplicate points factor with jitter") {
  GaussianProcess gp(Kernel::squared_exponential(1.0), 0.0);
  for (int k = 0; k < 4; ++k) gp.add_observation(vec({0.5}), 1.0);
  CHECK(gp.jitter() > 0.0);
  CHECK(gp.jitter() <= 1e-6);
  CHECK(std::isfinite(gp.predict(vec({0.2})).mean));
}

TEST_CASE("beta schedule") {
  AcquisitionConfig c;
  c.dimension = 6;
  CHECK(beta_schedule(c, 1.0) == doctest::Approx(0.2 * 6 * std::log(2.0)).epsilon(1e-12));
  CHECK(beta_schedule(c, std::numbers::e / 2.0) == doctest::Approx(1.2).epsilon(1e-12));
  AcquisitionConfig th;
  th.mode = BetaMode::Theoretical;
  th.noise = 0.0;
  th.delta = 0.5;
  CHECK(beta_schedule(th, 7.0) == 1.0);
  th.noise = 0.01;
  for (double t = 1; t < 50; ++t) CHECK(beta_schedule(th, t) > 0.0);
}

TEST_CASE("information gain surrogate is nondecreasing") {
  for (KernelFamily f : {KernelFamily::SquaredExponential, KernelFamily::Matern52})
    for (long t = 1; t < 200; ++t) CHECK(information_gain_surrogate(f, 3, t + 1) >= information_gain_surrogate(f, 3, t));
  CHECK(information_gain_surrogate(KernelFamily::SquaredExponential, 2, 9) ==
        doctest::Approx(std::pow(std::log(10.0), 3.0)));
}

TEST_CASE("ucb acquisition") {
  // beta(t) = 0.2 * D * ln(2t); D = 5, t = e/2 gives 1, scale 0.4 gives 2.
  AcquisitionConfig c;
  c.dimension = 5;
  GaussianProcess empty(Kernel::squared_exponential(1.0), 0.01);
  const long t1 = 1;
  const double b1 = beta_schedule(c, 1.0);
  CHECK(ucb_acquisition(empty, c, vec({0.3}), t1) == doctest::Approx(-b1));

  GaussianProcess one(Kernel::squared_exponential(1.0), 0.25);
  one.add_observation(vec({0.5}), 2.0);
  c.scale = 2.0 / (c.dimension * std::log(2.0));
  CHECK(beta_schedule(c, 1.0) == doctest::Approx(2.0));
  CHECK(ucb_acquisition(one, c, vec({0.5}), 1) == doctest::Approx(1.6 - 2.0 * std::sqrt(0.2)).epsilon(1e-10));
  c.scale = 0.0;
  CHECK(ucb_acquisition(one, c, vec({0.1}), 3) == one.predict(vec({0.1})).mean);
}

TEST_CASE("minimize acquisition") {
  AcquisitionConfig c;
  c.dimension = 1;
  const SolverOptions opts;

  SUBCASE("flat landscape returns the first candidate") {
    GaussianProcess empty(Kernel::squared_exponential(1.0), 0.01);
    Rng rng(4), copy(4);
    const Minimum m = minimize_acquisition(empty, c, Box::uniform(2, 0.0, 1.0), 1, opts, rng);
    CHECK(m.value == doctest::Approx(-beta_schedule(c, 1.0)));
    Vector first(2);
    first[0] = uniform01(copy);
    first[1] = uniform01(copy);
    CHECK(m.argmin.isApprox(first));
  }
  SUBCASE("degenerate box") {
    GaussianProcess empty(Kernel::squared_exponential(1.0), 0.01);
    Rng rng(1);
    const Box b(vec({0.25, 0.75}), vec({0.25, 0.75}));
    const Minimum m = minimize_acquisition(empty, c, b, 1, opts, rng);
    CHECK(m.argmin == vec({0.25, 0.75}));
  }
  SUBCASE("empty box is rejected") {
    GaussianProcess empty(Kernel::squared_exponential(1.0), 0.01);
    Rng rng(1);
    CHECK_THROWS_AS(minimize_acquisition(empty, c, Box(vec({0.5}), vec({0.1})), 1, opts, rng), InvalidInput);
  }
  SUBCASE("posterior mean of a parabola") {
    GaussianProcess gp(Kernel::squared_exponential(0.3), 1e-6);
    for (int i = 0; i <= 10; ++i) {
      const double x = i / 10.0;
      gp.add_observation(vec({x}), (x - 0.5) * (x - 0.5));
    }
    // Dense-grid oracle at 1e-3 resolution.
    double best_x = 0.0, best_v = 1e300;
    for (int i = 0; i <= 1000; ++i) {
      const double v = gp.predict(vec({i / 1000.0})).mean;
      if (v < best_v) best_v = v, best_x = i / 1000.0;
    }
    c.scale = 0.0;
    Rng rng(9);
    const Minimum m = minimize_acquisition(gp, c, Box::uniform(1, 0.0, 1.0), 5, opts, rng);
    CHECK(std::abs(m.argmin[0] - 0.5) <= 0.05);
    CHECK(std::abs(m.argmin[0] - best_x) <= 1e-2);
  }
  SUBCASE("deterministic given the seed") {
    GaussianProcess gp(Kernel::squared_exponential(0.3), 1e-3);
    gp.add_observation(vec({0.2, 0.2}), 1.0);
    gp.add_observation(vec({0.7, 0.1}), -0.5);
    Rng a(42), b(42);
    const Minimum ma = minimize_acquisition(gp, c, Box::uniform(2, 0.0, 1.0), 3, opts, a);
    const Minimum mb = minimize_acquisition(gp, c, Box::uniform(2, 0.0, 1.0), 3, opts, b);
    CHECK(ma.argmin == mb.argmin);
    CHECK(ma.value == mb.value);
  }
}

TEST_CASE("mle lengthscale") {
  SUBCASE("recovers the generating lengthscale") {
    Rng rng(2024);
    const int n = 30;
    const Matrix x = random_points(2, n, rng);
    Matrix g = kernel_matrix(Kernel::squared_exponential(0.5), x, x);
    g.diagonal().array() += 1e-8;
    const Matrix l = Eigen::LLT<Matrix>(g).matrixL();
    Vector z(n);
    for (int i = 0; i < n; ++i) z[i] = standard_normal(rng);
    const Vector y = l * z;
    GaussianProcess gp(Kernel::squared_exponential(0.1), 1e-4);
    gp.reset_data(x, y);
    const double w = mle_hyperparams(gp).lengthscale[0];
    const double step = std::pow(10.0, 3.0 / 24.0);
    CHECK(w >= 0.5 / step);
    CHECK(w <= 0.5 * step);
  }
  SUBCASE("constant data returns the smallest grid value") {
    GaussianProcess gp(Kernel::squared_exponential(0.3), 1e-4);
    for (int i = 0; i < 6; ++i) gp.add_observation(vec({i / 5.0}), 0.7);
    CHECK(mle_hyperparams(gp).lengthscale[0] == doctest::Approx(1e-2));
  }
  SUBCASE("too few observations keeps the kernel") {
    GaussianProcess gp(Kernel::squared_exponential(0.3), 1e-4);
    for (int i = 0; i < 3; ++i) gp.add_observation(vec({i / 2.0}), i);
    CHECK(mle_hyperparams(gp).lengthscale[0] == 0.3);
  }
}
