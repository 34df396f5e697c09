#include "lambo/surrogate.hpp"

#include "lambo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lambo {

std::string to_string(PriorMeanMode m) { return m == PriorMeanMode::Zero ? "zero" : "data-mean"; }

PriorMeanMode prior_mean_from_string(const std::string& s) {
  if (s == "zero") return PriorMeanMode::Zero;
  if (s == "data-mean") return PriorMeanMode::DataMean;
  throw InvalidInput("unknown prior mean mode '" + s + "' (expected zero or data-mean)");
}

namespace {

Kernel initial_kernel(const ModelConfig& cfg, const Box& domain) {
  const double w = cfg.initial_lengthscale * std::max(domain.width().maxCoeff(), 1e-12);
  return cfg.family == KernelFamily::Matern52 ? Kernel::matern52(w) : Kernel::squared_exponential(w);
}

}  // namespace

Surrogate::Surrogate(const ModelConfig& cfg, const Box& domain)
    : cfg_(cfg), gp_(initial_kernel(cfg, domain), cfg.noise, 0.0), best_(std::numeric_limits<double>::infinity()) {}

void Surrogate::add(const Vector& x, double y) {
  xs_.push_back(x);
  ys_.push_back(y);
  kept_.push_back(ys_.size() - 1);
  best_ = std::min(best_, y);
  const std::size_t cap = cfg_.max_points;
  if (cap > 0 && kept_.size() > cap + cap / 4) {
    // Best quarter by value, then fill with the most recent observations.
    std::vector<std::size_t> order(ys_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ys_[a] < ys_[b]; });
    std::vector<char> keep(ys_.size(), 0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < order.size() && n < cap / 4; ++i, ++n) keep[order[i]] = 1;
    for (std::size_t i = ys_.size(); i-- > 0 && n < cap;)
      if (!keep[i]) {
        keep[i] = 1;
        ++n;
      }
    kept_.clear();
    for (std::size_t i = 0; i < ys_.size(); ++i)
      if (keep[i]) kept_.push_back(i);
    rebuild();
    return;
  }
  gp_.add_observation(x, scaled(y));
}

void Surrogate::rebuild() {
  Matrix x(xs_.front().size(), static_cast<Eigen::Index>(kept_.size()));
  Vector y(static_cast<Eigen::Index>(kept_.size()));
  for (std::size_t k = 0; k < kept_.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k)) = xs_[kept_[k]];
    y[static_cast<Eigen::Index>(k)] = scaled(ys_[kept_[k]]);
  }
  gp_.reset_data(std::move(x), std::move(y));
}

void Surrogate::refit() {
  if (kept_.empty()) return;
  double mean = 0.0;
  for (std::size_t i : kept_) mean += ys_[i];
  mean /= static_cast<double>(kept_.size());
  offset_ = cfg_.prior_mean == PriorMeanMode::DataMean ? mean : 0.0;
  scale_ = 1.0;
  if (cfg_.standardize && kept_.size() > 1) {
    double ss = 0.0;
    for (std::size_t i : kept_) ss += (ys_[i] - mean) * (ys_[i] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(kept_.size() - 1));
    if (sd > 1e-12) scale_ = sd;
  }
  rebuild();
  gp_.set_kernel(mle_hyperparams(gp_, cfg_.mle));
}

}  // namespace lambo
