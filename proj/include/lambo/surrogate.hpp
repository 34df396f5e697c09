#pragma once

#include "lambo/gp.hpp"

#include <string>
#include <vector>

namespace lambo {

enum class PriorMeanMode { Zero, DataMean };

std::string to_string(PriorMeanMode m);
PriorMeanMode prior_mean_from_string(const std::string& s);

/// GP, acquisition and inner-solver settings shared by LaMBO and the baselines.
struct ModelConfig {
  KernelFamily family = KernelFamily::SquaredExponential;
  /// Initial lengthscale as a fraction of the widest domain edge.
  double initial_lengthscale = 0.25;
  /// Noise level added to the Gram diagonal as K + noise * I.
  double noise = 0.01;
  PriorMeanMode prior_mean = PriorMeanMode::DataMean;
  /// Divide observations by their sample standard deviation at each refit so
  /// the unit signal variance matches the data amplitude.
  bool standardize = true;
  /// Cap on retained observations; 0 keeps everything. When the data grows
  /// past 1.25x the cap it is trimmed back to the best quarter plus the most
  /// recent points.
  std::size_t max_points = 0;
  int refit_period = 15;
  AcquisitionConfig acquisition;
  SolverOptions solver;
  MleOptions mle;
};

/// GP plus the bookkeeping around it: output scaling, data trimming and
/// periodic refits. The GP works in scaled units (y - offset) / scale.
class Surrogate {
 public:
  Surrogate(const ModelConfig& cfg, const Box& domain);

  void add(const Vector& x, double y);
  /// Recomputes the output offset and scale, then refits the lengthscale.
  void refit();

  const GaussianProcess& gp() const { return gp_; }
  /// Smallest observation seen so far in GP units (+inf when empty).
  double best_observed() const { return scaled(best_); }
  /// Raw observation mapped to GP units.
  double scaled(double y) const { return (y - offset_) / scale_; }
  double offset() const { return offset_; }
  double scale() const { return scale_; }
  std::size_t observations() const { return ys_.size(); }

 private:
  void rebuild();

  ModelConfig cfg_;
  GaussianProcess gp_;
  std::vector<Vector> xs_;
  std::vector<double> ys_;
  std::vector<std::size_t> kept_;
  double best_;
  double offset_ = 0.0;
  double scale_ = 1.0;
};

}  // namespace lambo
