#include "lambo/gp.hpp"

#include "lambo/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace lambo {

// ---------------------------------------------------------------------------
// Box

Box::Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw InvalidInput("Box: lo/hi dimension mismatch");
}

Box Box::uniform(int dim, double lo, double hi) {
  return Box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool Box::empty() const {
  if (lo.size() == 0) return true;
  for (Eigen::Index j = 0; j < lo.size(); ++j)
    if (!(lo[j] <= hi[j])) return true;
  return false;
}

bool Box::contains(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (x[j] < lo[j] || x[j] > hi[j]) return false;
  return true;
}

int Box::free_dims() const {
  int n = 0;
  for (Eigen::Index j = 0; j < lo.size(); ++j)
    if (hi[j] > lo[j]) ++n;
  return n;
}

std::string Box::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index j = 0; j < lo.size(); ++j) {
    if (j) os << " x ";
    os << '[' << lo[j] << ", " << hi[j] << ']';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Kernels

std::string to_string(KernelFamily f) {
  return f == KernelFamily::SquaredExponential ? "squared-exponential" : "matern-5/2";
}

KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "squared-exponential" || s == "se" || s == "rbf") return KernelFamily::SquaredExponential;
  if (s == "matern-5/2" || s == "matern52") return KernelFamily::Matern52;
  throw InvalidInput("unknown kernel family '" + s + "'");
}

Kernel Kernel::squared_exponential(double w, double variance) {
  return Kernel{KernelFamily::SquaredExponential, Vector::Constant(1, w), variance};
}

Kernel Kernel::matern52(double w, double variance) {
  return Kernel{KernelFamily::Matern52, Vector::Constant(1, w), variance};
}

namespace {

void check_lengthscale(const Kernel& k, Eigen::Index dim) {
  if (k.lengthscale.size() != 1 && k.lengthscale.size() != dim)
    throw InvalidInput("kernel lengthscale has " + std::to_string(k.lengthscale.size()) +
                       " entries for input dimension " + std::to_string(dim));
}

double covariance_from_sqdist(const Kernel& k, double r2) {
  if (k.family == KernelFamily::SquaredExponential) return k.variance * std::exp(-r2);
  const double r = std::sqrt(r2);
  const double s5r = std::sqrt(5.0) * r;
  return k.variance * (1.0 + s5r + 5.0 * r2 / 3.0) * std::exp(-s5r);
}

Matrix scale_inputs(const Kernel& k, const Matrix& a) {
  if (k.lengthscale.size() == 1) return a / k.lengthscale[0];
  return a.array().colwise() / k.lengthscale.array();
}

}  // namespace

double kernel_eval(const Kernel& k, const Vector& x, const Vector& x2) {
  if (x.size() != x2.size())
    throw InvalidInput("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                       std::to_string(x2.size()) + ")");
  check_lengthscale(k, x.size());
  double r2 = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double w = k.lengthscale.size() == 1 ? k.lengthscale[0] : k.lengthscale[j];
    const double d = (x[j] - x2[j]) / w;
    r2 += d * d;
  }
  return covariance_from_sqdist(k, r2);
}

Matrix kernel_matrix(const Kernel& k, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw InvalidInput("kernel_matrix: dimension mismatch");
  check_lengthscale(k, a.rows());
  const Matrix as = scale_inputs(k, a);
  const Matrix bs = scale_inputs(k, b);
  const Eigen::RowVectorXd an = as.colwise().squaredNorm();
  const Eigen::RowVectorXd bn = bs.colwise().squaredNorm();
  Matrix r2 = -2.0 * (as.transpose() * bs);
  r2.colwise() += an.transpose();
  r2.rowwise() += bn;
  return r2.unaryExpr([&](double v) { return covariance_from_sqdist(k, std::max(v, 0.0)); });
}

// ---------------------------------------------------------------------------
// GaussianProcess

namespace {

constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-8, 1e-6};
constexpr double kVarianceTolerance = 1e-9;

// Factor gram + (jitter * variance) I, escalating through the ladder.
bool factor_with_jitter(const Matrix& gram, double variance, Matrix& chol, double& jitter) {
  const Eigen::Index n = gram.rows();
  for (double j : kJitterLadder) {
    Matrix g = gram;
    g.diagonal().array() += j * variance;
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0) {
      chol = llt.matrixL();
      jitter = j * variance;
      return true;
    }
  }
  chol.resize(n, n);
  return false;
}

}  // namespace

GaussianProcess::GaussianProcess(Kernel kernel, double noise, double prior_mean)
    : kernel_(std::move(kernel)), noise_(noise), prior_mean_(prior_mean) {
  if (noise < 0.0) throw InvalidInput("GaussianProcess: noise must be non-negative");
  if (!(kernel_.variance > 0.0)) throw InvalidInput("GaussianProcess: signal variance must be positive");
  if ((kernel_.lengthscale.array() <= 0.0).any())
    throw InvalidInput("GaussianProcess: lengthscale must be positive");
}

void GaussianProcess::refactor() {
  const Eigen::Index n = values_.size();
  if (n == 0) {
    chol_.resize(0, 0);
    weights_.resize(0);
    jitter_ = 0.0;
    return;
  }
  Matrix gram = kernel_matrix(kernel_, inputs_, inputs_);
  gram = 0.5 * (gram + gram.transpose());
  gram.diagonal().array() += noise_;
  if (!factor_with_jitter(gram, kernel_.variance, chol_, jitter_))
    throw SolverError("Gram matrix is numerically singular after jitter escalation (n = " +
                      std::to_string(n) + ")");
  update_weights();
}

void GaussianProcess::update_weights() {
  Vector r = values_.array() - prior_mean_;
  chol_.triangularView<Eigen::Lower>().solveInPlace(r);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(r);
  weights_ = std::move(r);
}

void GaussianProcess::add_observation(const Vector& x, double y) {
  if (!std::isfinite(y)) throw InvalidInput("GaussianProcess: non-finite observation");
  const Eigen::Index n = values_.size();
  if (n == 0) {
    check_lengthscale(kernel_, x.size());
    inputs_ = x;
    values_ = Vector::Constant(1, y);
    refactor();
    return;
  }
  if (x.size() != inputs_.rows()) throw InvalidInput("GaussianProcess: dimension mismatch");

  const Vector kv = kernel_matrix(kernel_, inputs_, x).col(0);
  const double c = kernel_.variance + noise_ + jitter_;
  Vector l = chol_.triangularView<Eigen::Lower>().solve(kv);
  const double d2 = c - l.squaredNorm();

  inputs_.conservativeResize(Eigen::NoChange, n + 1);
  inputs_.col(n) = x;
  values_.conservativeResize(n + 1);
  values_[n] = y;

  if (d2 > 1e-12 * c) {
    chol_.conservativeResize(n + 1, n + 1);
    chol_.col(n).setZero();
    chol_.row(n).head(n) = l.transpose();
    chol_(n, n) = std::sqrt(d2);
    update_weights();
  } else {
    refactor();
  }
}

void GaussianProcess::reset_data(Matrix inputs, Vector values) {
  if (inputs.cols() != values.size())
    throw InvalidInput("GaussianProcess: number of points differs from number of values");
  if (values.size() > 0) check_lengthscale(kernel_, inputs.rows());
  inputs_ = std::move(inputs);
  values_ = std::move(values);
  refactor();
}

void GaussianProcess::set_kernel(const Kernel& kernel) {
  kernel_ = kernel;
  refactor();
}

void GaussianProcess::set_prior_mean(double m) {
  prior_mean_ = m;
  if (values_.size() > 0) update_weights();
}

Prediction GaussianProcess::predict(const Vector& x) const {
  Matrix q = x;
  Vector mean, sd;
  predict_batch(q, mean, sd);
  return {mean[0], sd[0]};
}

void GaussianProcess::predict_batch(const Matrix& queries, Vector& mean, Vector& std) const {
  const Eigen::Index m = queries.cols();
  if (values_.size() == 0) {
    check_lengthscale(kernel_, queries.rows());
    mean = Vector::Constant(m, prior_mean_);
    std = Vector::Constant(m, std::sqrt(kernel_.variance));
    return;
  }
  if (queries.rows() != inputs_.rows())
    throw InvalidInput("posterior_predict: query dimension " + std::to_string(queries.rows()) +
                       " does not match data dimension " + std::to_string(inputs_.rows()));
  Matrix ks = kernel_matrix(kernel_, inputs_, queries);
  mean = (ks.transpose() * weights_).array() + prior_mean_;
  chol_.triangularView<Eigen::Lower>().solveInPlace(ks);
  Vector var = kernel_.variance - ks.colwise().squaredNorm().transpose().array();
  std.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double v = var[i];
    if (v < 0.0) {
      if (v < -kVarianceTolerance)
        throw SolverError("posterior variance " + std::to_string(v) + " below tolerance");
      v = 0.0;
    }
    std[i] = std::sqrt(v);
  }
}

double GaussianProcess::log_marginal_likelihood() const {
  const Eigen::Index n = values_.size();
  if (n == 0) return 0.0;
  const Vector r = values_.array() - prior_mean_;
  return -0.5 * r.dot(weights_) - chol_.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

Prediction posterior_predict(const GaussianProcess& gp, const Vector& x) { return gp.predict(x); }

// ---------------------------------------------------------------------------
// Acquisition

double information_gain_surrogate(KernelFamily family, int dimension, long t) {
  if (t <= 0) return 0.0;
  const double td = static_cast<double>(t);
  const double d = dimension;
  if (family == KernelFamily::SquaredExponential) return std::pow(std::log(td + 1.0), d + 1.0);
  const double nu = 2.5;
  const double exponent = d * (d + 1.0) / (2.0 * nu + d * (d + 1.0));
  return std::pow(td, exponent) * std::log(td + 1.0);
}

double beta_schedule(const AcquisitionConfig& cfg, double t) {
  if (cfg.mode == BetaMode::Practical) return cfg.scale * cfg.dimension * std::log(2.0 * t);
  const double delta = cfg.delta > 0.0 ? cfg.delta : 1.0 / static_cast<double>(std::max(cfg.horizon, 2L));
  const double gamma = information_gain_surrogate(cfg.family, cfg.dimension, static_cast<long>(t) - 1);
  return 1.0 + cfg.noise * std::sqrt(2.0 * (gamma + 1.0 + std::log(1.0 / delta)));
}

double ucb_acquisition(const GaussianProcess& gp, const AcquisitionConfig& cfg, const Vector& x,
                       long t) {
  const Prediction p = gp.predict(x);
  const double beta = beta_schedule(cfg, static_cast<double>(t));
  if (beta == 0.0) return p.mean;
  return p.mean - beta * p.std;
}

// ---------------------------------------------------------------------------
// Box-constrained minimization

namespace {

constexpr Eigen::Index kBatchColumns = 1024;

void evaluate_chunked(const BatchObjective& f, const Matrix& x, Vector& out) {
  const Eigen::Index m = x.cols();
  if (m <= kBatchColumns) {
    f(x, out);
  } else {
    out.resize(m);
    Vector part;
    for (Eigen::Index s = 0; s < m; s += kBatchColumns) {
      const Eigen::Index len = std::min(kBatchColumns, m - s);
      f(x.middleCols(s, len), part);
      out.segment(s, len) = part;
    }
  }
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (std::isnan(out[i])) out[i] = std::numeric_limits<double>::infinity();
}

Eigen::Index first_argmin(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] < v[best]) best = i;
  return best;
}

}  // namespace

Minimum minimize_box(const BatchObjective& f, const Box& region, const SolverOptions& opts, Rng& rng) {
  if (region.empty()) throw InvalidInput("minimize: empty region " + region.to_string());
  const int dim = region.dim();
  const int free = std::max(1, region.free_dims());
  const Eigen::Index count = static_cast<Eigen::Index>(std::max(1, opts.candidates_per_dim)) * free;

  const Vector width = region.width();
  Matrix seeds(dim, count);
  for (Eigen::Index s = 0; s < count; ++s)
    for (int j = 0; j < dim; ++j)
      seeds(j, s) = std::min(region.hi[j], region.lo[j] + uniform01(rng) * width[j]);

  Vector values;
  evaluate_chunked(f, seeds, values);
  const Eigen::Index best = first_argmin(values);
  Vector x = seeds.col(best);
  double fx = values[best];

  static constexpr double kOffsets[] = {1.0, -1.0, 0.5, -0.5, 0.25, -0.25, 0.125, -0.125};
  constexpr int kLine = 8;
  Matrix line(dim, kLine);
  Vector line_values;
  double step = 0.25;
  for (int sweep = 0; sweep < opts.sweeps; ++sweep, step *= 0.5) {
    for (int j = 0; j < dim; ++j) {
      if (!(width[j] > 0.0)) continue;
      for (int c = 0; c < kLine; ++c) {
        line.col(c) = x;
        line(j, c) = std::clamp(x[j] + kOffsets[c] * step * width[j], region.lo[j], region.hi[j]);
      }
      evaluate_chunked(f, line, line_values);
      const Eigen::Index c = first_argmin(line_values);
      if (line_values[c] < fx) {
        fx = line_values[c];
        x = line.col(c);
      }
    }
  }
  return {std::move(x), fx};
}

Minimum minimize_acquisition(const GaussianProcess& gp, const AcquisitionConfig& cfg,
                             const Box& region, long t, const SolverOptions& opts, Rng& rng) {
  const double beta = beta_schedule(cfg, static_cast<double>(t));
  Vector mean, sd;
  auto f = [&](const Matrix& x, Vector& out) {
    gp.predict_batch(x, mean, sd);
    out = beta == 0.0 ? mean : Vector(mean - beta * sd);
  };
  return minimize_box(f, region, opts, rng);
}

// ---------------------------------------------------------------------------
// Hyperparameters

Kernel mle_hyperparams(const GaussianProcess& gp, const MleOptions& opts) {
  if (gp.size() < opts.min_observations) return gp.kernel();

  const Matrix& x = gp.inputs();
  const Vector& y = gp.values();
  const double scale = [&] {
    const double s = (x.rowwise().maxCoeff() - x.rowwise().minCoeff()).maxCoeff();
    return s > 0.0 ? s : 1.0;
  }();
  auto grid_value = [&](int i) {
    const double a = std::log(opts.grid_lo), b = std::log(opts.grid_hi);
    const double frac = opts.grid_size > 1 ? static_cast<double>(i) / (opts.grid_size - 1) : 0.0;
    return scale * std::exp(a + frac * (b - a));
  };

  Kernel out = gp.kernel();
  // Constant data carries no lengthscale information.
  if (y.maxCoeff() - y.minCoeff() <= 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff())) {
    out.lengthscale = Vector::Constant(1, grid_value(0));
    return out;
  }

  const Vector r = y.array() - gp.prior_mean();
  const double n = static_cast<double>(y.size());
  double best_ll = -std::numeric_limits<double>::infinity();
  int best_i = -1;
  Matrix chol;
  for (int i = 0; i < opts.grid_size; ++i) {
    Kernel k = gp.kernel();
    k.lengthscale = Vector::Constant(1, grid_value(i));
    Matrix gram = kernel_matrix(k, x, x);
    gram.diagonal().array() += gp.noise();
    double jitter = 0.0;
    if (!factor_with_jitter(gram, k.variance, chol, jitter)) continue;
    const auto L = chol.triangularView<Eigen::Lower>();
    const Vector a = L.solve(r);
    const double ll = -0.5 * a.squaredNorm() - chol.diagonal().array().log().sum() -
                      0.5 * n * std::log(2.0 * std::numbers::pi);
    if (ll > best_ll) {
      best_ll = ll;
      best_i = i;
    }
  }
  if (best_i < 0) return gp.kernel();
  out.lengthscale = Vector::Constant(1, grid_value(best_i));
  return out;
}

}  // namespace lambo
