#include "lambo/smb.hpp"

#include "lambo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lambo {

namespace {

ArmId draw_from(std::span<const double> weights, std::size_t offset, double total, Rng& rng) {
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last_positive = k;
    if (u < acc) return offset + k;
  }
  return offset + last_positive;
}

}  // namespace

SmbState make_smb(std::shared_ptr<const Mset> tree, double eta, Rng rng) {
  if (!tree) throw InvalidInput("make_smb: null tree");
  if (!(eta > 0.0)) throw InvalidInput("make_smb: learning rate must be positive");
  SmbState s;
  const std::size_t k = tree->num_arms();
  s.p.assign(k, 1.0 / static_cast<double>(k));
  s.eta = eta;
  s.prev_level = tree->height();
  s.tree = std::move(tree);
  s.rng = std::move(rng);
  s.prev_arm = uniform_index(s.rng, k);
  return s;
}

double theoretical_learning_rate(const Mset& tree, long horizon) {
  const double k = static_cast<double>(std::max<std::size_t>(tree.num_arms(), 2));
  return std::sqrt(std::ldexp(1.0, -tree.height()) * std::log(k) / static_cast<double>(std::max(horizon, 1L)));
}

ArmId sample_arm(SmbState& s) {
  const auto& node = s.tree->nodes()[static_cast<std::size_t>(s.tree->ancestor(s.prev_arm, s.prev_level))];
  const std::span<const double> w(s.p.data() + node.first_leaf, node.end_leaf - node.first_leaf);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) {
    ++s.zero_mass_fallbacks;
    return node.first_leaf + uniform_index(s.rng, w.size());
  }
  return draw_from(w, node.first_leaf, total, s.rng);
}

LevelDraw draw_levels(SmbState& s) {
  const int H = s.tree->height();
  LevelDraw d;
  d.sigmas.resize(static_cast<std::size_t>(H));
  d.level = H;
  for (int h = 0; h < H; ++h) {
    d.sigmas[static_cast<std::size_t>(h)] = (s.rng() >> 63) ? 1 : -1;
    if (d.sigmas[static_cast<std::size_t>(h)] == -1 && d.level == H) d.level = h;
  }
  return d;
}

LossEstimate loss_estimator(const SmbState& s, std::span<const double> base, const LevelDraw& draw) {
  const Mset& tree = *s.tree;
  const std::size_t k = tree.num_arms();
  const int H = tree.height();
  if (base.size() != k) throw InvalidInput("loss_estimator: base loss vector has wrong length");
  if (draw.sigmas.size() != static_cast<std::size_t>(H))
    throw InvalidInput("loss_estimator: level draw does not match tree height");
  for (double b : base)
    if (!std::isfinite(b)) throw InvalidInput("loss_estimator: non-finite base loss");

  LossEstimate est;
  est.levels.reserve(static_cast<std::size_t>(H) + 1);
  est.levels.emplace_back(base.begin(), base.end());

  std::vector<double> scaled(k);
  for (int h = 1; h <= H; ++h) {
    const auto& below = est.levels.back();
    const double factor = 1.0 + draw.sigmas[static_cast<std::size_t>(h - 1)];
    for (std::size_t i = 0; i < k; ++i) scaled[i] = factor * below[i];

    std::vector<double> level(k, 0.0);
    std::size_t i = 0;
    while (i < k) {
      const auto& node = tree.nodes()[static_cast<std::size_t>(tree.ancestor(i, h))];
      const std::size_t first = node.first_leaf, end = node.end_leaf;
      double mass = 0.0;
      for (std::size_t j = first; j < end; ++j) mass += s.p[j];
      const bool uniform = !(mass > 0.0);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t j = first; j < end; ++j) {
        if (!uniform && s.p[j] <= 0.0) continue;
        lo = std::min(lo, scaled[j]);
        hi = std::max(hi, scaled[j]);
      }
      double sum = 0.0;
      for (std::size_t j = first; j < end; ++j) {
        const double w = uniform ? 1.0 / static_cast<double>(end - first) : s.p[j] / mass;
        if (w > 0.0) sum += w * std::exp(-s.eta * (scaled[j] - lo));
      }
      const double value = std::clamp(lo - std::log(sum) / s.eta, lo, hi);
      for (std::size_t j = first; j < end; ++j) level[j] = value;
      i = end;
    }
    est.levels.push_back(std::move(level));
  }

  est.ltilde.assign(base.begin(), base.end());
  for (int h = 0; h < H; ++h) {
    const double sigma = draw.sigmas[static_cast<std::size_t>(h)];
    const auto& lv = est.levels[static_cast<std::size_t>(h)];
    for (std::size_t i = 0; i < k; ++i) est.ltilde[i] += sigma * lv[i];
  }
  return est;
}

bool loss_bounds_hold(const LossEstimate& est, const LevelDraw& draw) {
  double bound = 1.0;
  for (std::size_t h = 0; h < est.levels.size(); ++h) {
    if (h > 0) bound *= 1.0 + draw.sigmas[h - 1];
    for (double v : est.levels[h])
      if (!(v >= 0.0 && v <= bound)) return false;
  }
  return true;
}

void multiplicative_update(SmbState& s, std::span<const double> ltilde) {
  const std::size_t k = s.p.size();
  if (ltilde.size() != k) throw InvalidInput("multiplicative_update: wrong length");
  const bool guarded = s.eta * std::ldexp(1.0, s.tree->height()) <= 1.0;
  if (guarded) {
    const double floor = -1.0 / s.eta - 1e-9;
    for (std::size_t i = 0; i < k; ++i)
      if (ltilde[i] < floor)
        throw ContractViolation("multiplicative_update: estimated loss " + std::to_string(ltilde[i]) +
                                " below -1/eta for arm " + std::to_string(i));
  } else {
    ++s.unguarded_updates;
  }
  double top = -std::numeric_limits<double>::infinity();
  std::vector<double> logw(k, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < k; ++i) {
    if (s.p[i] <= 0.0) continue;
    logw[i] = std::log(s.p[i]) - s.eta * ltilde[i];
    top = std::max(top, logw[i]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    s.p[i] = s.p[i] > 0.0 ? std::exp(logw[i] - top) : 0.0;
    total += s.p[i];
  }
  for (double& v : s.p) v /= total;
}

DiscardResult discard_arms(SmbState& s, double threshold) {
  DiscardResult out;
  const bool any_survivor =
      std::any_of(s.p.begin(), s.p.end(), [&](double v) { return v > 0.0 && v >= threshold; });
  if (!any_survivor) {
    out.noop = true;
    return out;
  }
  for (std::size_t i = 0; i < s.p.size(); ++i)
    if (s.p[i] > 0.0 && s.p[i] < threshold && i != s.prev_arm) out.removed.push_back(i);
  if (out.removed.empty()) return out;
  for (ArmId i : out.removed) s.p[i] = 0.0;
  const double total = std::accumulate(s.p.begin(), s.p.end(), 0.0);
  for (double& v : s.p) v /= total;
  return out;
}

void refresh_probabilities(SmbState& s) {
  const auto live = static_cast<double>(std::count_if(s.p.begin(), s.p.end(), [](double v) { return v > 0.0; }));
  for (double& v : s.p) v = v > 0.0 ? 1.0 / live : 0.0;
}

SmbStepRecord smb_step(SmbState& s, std::span<const double> base) {
  SmbStepRecord r;
  r.arm = sample_arm(s);
  r.draw = draw_levels(s);
  r.estimate = loss_estimator(s, base, r.draw);
  multiplicative_update(s, r.estimate.ltilde);
  s.prev_arm = r.arm;
  s.prev_level = r.draw.level;
  return r;
}

}  // namespace lambo
