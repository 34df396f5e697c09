#pragma once

#include "lambo/box.hpp"
#include "lambo/rng.hpp"

#include <functional>
#include <string>

namespace lambo {

enum class KernelFamily { SquaredExponential, Matern52 };

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& s);

/// Stationary covariance. The squared-exponential form is
/// variance * exp(-|x - x'|^2 / w^2) (no factor 1/2). Lengthscale holds one
/// entry (isotropic) or one entry per input dimension.
struct Kernel {
  KernelFamily family = KernelFamily::SquaredExponential;
  Vector lengthscale = Vector::Ones(1);
  double variance = 1.0;

  static Kernel squared_exponential(double w, double variance = 1.0);
  static Kernel matern52(double w, double variance = 1.0);
};

double kernel_eval(const Kernel& k, const Vector& x, const Vector& x2);

/// Cross-covariance between the columns of a (D x n) and b (D x m).
Matrix kernel_matrix(const Kernel& k, const Matrix& a, const Matrix& b);

struct Prediction {
  double mean = 0.0;
  double std = 0.0;
};

/// GP posterior state. The regularized Gram matrix is K + noise * I, with
/// noise entering linearly (not squared). Factorization uses Cholesky with a
/// jitter ladder of 1e-10, 1e-8, 1e-6 (times the signal variance).
class GaussianProcess {
 public:
  GaussianProcess(Kernel kernel, double noise, double prior_mean = 0.0);

  /// Append one observation; O(n^2) via a rank-one extension of the factor.
  void add_observation(const Vector& x, double y);
  /// Replace all data at once; O(n^3).
  void reset_data(Matrix inputs, Vector values);

  void set_kernel(const Kernel& kernel);
  void set_prior_mean(double m);

  const Kernel& kernel() const { return kernel_; }
  double noise() const { return noise_; }
  double prior_mean() const { return prior_mean_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  int dim() const { return static_cast<int>(inputs_.rows()); }
  const Matrix& inputs() const { return inputs_; }
  const Vector& values() const { return values_; }
  double jitter() const { return jitter_; }

  Prediction predict(const Vector& x) const;
  /// Column-wise predictions for the (D x m) query matrix.
  void predict_batch(const Matrix& queries, Vector& mean, Vector& std) const;
  double log_marginal_likelihood() const;

 private:
  void refactor();
  void update_weights();

  Kernel kernel_;
  double noise_;
  double prior_mean_;
  Matrix inputs_;   // D x n
  Vector values_;   // n
  Matrix chol_;     // lower factor of K + (noise + jitter) I
  Vector weights_;  // (K + noise I)^{-1} (y - prior_mean)
  double jitter_ = 0.0;
};

Prediction posterior_predict(const GaussianProcess& gp, const Vector& x);

enum class BetaMode { Practical, Theoretical };

struct AcquisitionConfig {
  BetaMode mode = BetaMode::Practical;
  double scale = 0.2;
  /// Confidence parameter for the theoretical schedule; <= 0 means 1/horizon.
  double delta = 0.1;
  int dimension = 1;
  long horizon = 1;
  /// Sub-Gaussian noise level used by the theoretical schedule.
  double noise = 0.01;
  KernelFamily family = KernelFamily::SquaredExponential;
};

/// Analytic growth-rate stand-in for the maximum information gain.
/// SE: (log(t+1))^(D+1). Matern-5/2: t^(D(D+1)/(5+D(D+1))) * log(t+1).
double information_gain_surrogate(KernelFamily family, int dimension, long t);

double beta_schedule(const AcquisitionConfig& cfg, double t);

/// Lower confidence bound mu - beta_t * sigma (minimization convention).
double ucb_acquisition(const GaussianProcess& gp, const AcquisitionConfig& cfg, const Vector& x,
                       long t);

struct SolverOptions {
  int candidates_per_dim = 512;
  int sweeps = 3;
};

struct Minimum {
  Vector argmin;
  double value = 0.0;
};

/// Evaluates the columns of a (D x m) matrix into an m-vector.
using BatchObjective = std::function<void(const Matrix&, Vector&)>;

/// Uniform seeding with candidates_per_dim * (free dims) points, then
/// coordinate-descent sweeps from the best seed. Ties go to the lowest
/// candidate index; refinement only accepts strict improvements.
Minimum minimize_box(const BatchObjective& f, const Box& region, const SolverOptions& opts,
                     Rng& rng);

Minimum minimize_acquisition(const GaussianProcess& gp, const AcquisitionConfig& cfg,
                             const Box& region, long t, const SolverOptions& opts, Rng& rng);

struct MleOptions {
  int grid_size = 25;
  double grid_lo = 1e-2;
  double grid_hi = 1e1;
  std::size_t min_observations = 5;
};

/// Isotropic lengthscale maximizing the log marginal likelihood over a
/// log-spaced grid scaled by the widest observed input range.
Kernel mle_hyperparams(const GaussianProcess& gp, const MleOptions& opts = {});

}  // namespace lambo
