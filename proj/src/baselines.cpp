#include "lambo/baselines.hpp"

#include "lambo/errors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace lambo {

void BaselineConfig::validate() const {
  if (method == MethodId::Lambo) throw InvalidInput("baseline config: lambo is not a baseline");
  if (horizon < 0) throw InvalidInput("baseline config: horizon must be >= 0");
  if (initial_samples < 0) throw InvalidInput("baseline config: initial_samples must be >= 0");
  if (model.refit_period < 1) throw InvalidInput("baseline config: refit period must be >= 1");
  if (model.solver.candidates_per_dim < 1 || model.solver.sweeps < 0)
    throw InvalidInput("baseline config: solver settings out of range");
}

double expected_improvement(double mean, double sd, double best) {
  const double gap = best - mean;
  if (!(sd > 0.0)) return std::max(gap, 0.0);
  const double z = gap / sd;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return std::max(gap * cdf + sd * pdf, 0.0);
}

double ei_acquisition(const GaussianProcess& gp, const Vector& x, double best) {
  const Prediction p = gp.predict(x);
  return expected_improvement(p.mean, p.std, best);
}

double ei_per_cost(const GaussianProcess& gp, const Vector& x, double best, const ModularPoint& x_prev,
                   const CostModel& cm, std::span<const int> split) {
  const ModularPoint now = ModularPoint::from_flat(x, split);
  return ei_acquisition(gp, x, best) / (cm.min_positive() + movement_cost(now, x_prev, cm));
}

namespace {

std::vector<int> split_of(const Problem& p) {
  std::vector<int> s;
  for (const auto& b : p.modules) s.push_back(b.dim());
  return s;
}

Minimum maximize_ei(const GaussianProcess& gp, const Box& region, double best, const SolverOptions& opts, Rng& rng) {
  Vector mean, sd;
  auto f = [&](const Matrix& x, Vector& out) {
    gp.predict_batch(x, mean, sd);
    out.resize(mean.size());
    for (Eigen::Index i = 0; i < mean.size(); ++i) out[i] = -expected_improvement(mean[i], sd[i], best);
  };
  Minimum m = minimize_box(f, region, opts, rng);
  m.value = -m.value;
  return m;
}

/// Box with modules before `m` pinned to `prev` and the rest free.
Box suffix_box(const Problem& p, const ModularPoint& prev, std::size_t m) {
  Box b = p.objective.domain;
  Eigen::Index off = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const auto d = prev.blocks[j].size();
    b.lo.segment(off, d) = prev.blocks[j];
    b.hi.segment(off, d) = prev.blocks[j];
    off += d;
  }
  return b;
}

}  // namespace

RunTrace run_baseline(const BaselineConfig& cfg_in, const Problem& problem, std::uint64_t master_seed, long run_id) {
  BaselineConfig cfg = cfg_in;
  cfg.validate();
  if (problem.costs.costs.size() + 1 != problem.num_modules())
    throw InvalidInput("baseline: cost vector does not match module count");
  cfg.model.acquisition.dimension = problem.objective.dimension;
  cfg.model.acquisition.horizon = std::max(cfg.horizon, 1L);
  const auto split = split_of(problem);

  Rng solver_rng(method_seed(master_seed, cfg.method, run_id, Stream::Solver));
  Rng noise_rng(method_seed(master_seed, cfg.method, run_id, Stream::Noise));
  Surrogate model(cfg.model, problem.objective.domain);

  RunTrace trace;
  trace.method = to_string(cfg.method);
  trace.run_id = run_id;
  trace.seed = master_seed;
  trace.horizon = cfg.horizon;
  trace.lambda = problem.costs.lambda;
  trace.f_star = registered_optimum(problem.objective);
  trace.config = {{"initial_samples", std::to_string(cfg.initial_samples)},
                  {"init_counts_toward_horizon", "false"},
                  {"init_counts_toward_cost", "true"}};

  const double total = problem.costs.total();
  const auto design = initial_design(problem, cfg.initial_samples, init_seed(master_seed, run_id));
  const long count = static_cast<long>(design.points.size());
  for (long k = 0; k < count; ++k) {
    const auto& x = design.points[static_cast<std::size_t>(k)];
    TraceRecord r;
    r.t = k + 1 - count;
    r.x = x;
    r.y = design.values[static_cast<std::size_t>(k)];
    r.f_true = true_value(problem.objective, x);
    r.gamma = total;
    r.simple_regret = r.f_true - trace.f_star;
    r.changed_module = 0;
    push_record(trace, std::move(r));
    model.add(x, design.values[static_cast<std::size_t>(k)]);
  }
  trace.init_records = count;
  trace.init_cost = total * static_cast<double>(count);
  if (cfg.refit) model.refit();

  std::optional<ModularPoint> prev;
  if (count > 0) prev = ModularPoint::from_flat(design.points.back(), split);

  const Box& dom = problem.objective.domain;
  for (long t = 1; t <= cfg.horizon; ++t) {
    Vector x;
    const GaussianProcess& gp = model.gp();
    switch (cfg.method) {
      case MethodId::Random:
        x.resize(dom.dim());
        for (int i = 0; i < dom.dim(); ++i) x[i] = dom.lo[i] + uniform01(solver_rng) * (dom.hi[i] - dom.lo[i]);
        break;
      case MethodId::GpUcb:
        x = minimize_acquisition(gp, cfg.model.acquisition, dom, t, cfg.model.solver, solver_rng).argmin;
        break;
      case MethodId::GpEi:
        x = maximize_ei(gp, dom, model.best_observed(), cfg.model.solver, solver_rng).argmin;
        break;
      case MethodId::EiPerCost: {
        if (!prev) {
          x = maximize_ei(gp, dom, model.best_observed(), cfg.model.solver, solver_rng).argmin;
          break;
        }
        // Freeze a prefix of modules, maximize EI over the rest and divide by
        // the cost that moving the rest would incur.
        double best_score = -1.0;
        for (std::size_t m = 0; m < problem.num_modules(); ++m) {
          const Minimum cand = maximize_ei(gp, suffix_box(problem, *prev, m), model.best_observed(),
                                           cfg.model.solver, solver_rng);
          ModularPoint pt = ModularPoint::from_flat(cand.argmin, split);
          for (std::size_t j = 0; j < m; ++j) pt.blocks[j] = prev->blocks[j];
          const double score = cand.value / (problem.costs.min_positive() + movement_cost(pt, *prev, problem.costs));
          if (score > best_score) {
            best_score = score;
            x = pt.flatten();
          }
        }
        break;
      }
      case MethodId::Lambo:
        throw InvalidInput("baseline: lambo is not a baseline");
    }

    double y = 0.0, f_true = 0.0;
    try {
      y = evaluate(problem.objective, x, noise_rng);
      f_true = true_value(problem.objective, x);
    } catch (const std::exception& e) {
      trace.error = e.what();
      throw ObjectiveError(e.what(), t);
    }
    if (cfg.method != MethodId::Random) model.add(x, y);

    const ModularPoint now = ModularPoint::from_flat(x, split);
    TraceRecord r;
    r.t = t;
    r.x = x;
    r.y = y;
    r.f_true = f_true;
    r.simple_regret = f_true - trace.f_star;
    if (prev) {
      r.gamma = movement_cost(now, *prev, problem.costs);
      const auto changed = first_changed_block(now, *prev);
      r.changed_module = changed ? static_cast<int>(*changed) : -1;
    } else {
      r.gamma = total;
      r.changed_module = 0;
    }
    push_record(trace, std::move(r));
    prev = now;
    if (cfg.refit && cfg.method != MethodId::Random && t % cfg.model.refit_period == 0) model.refit();
  }
  return trace;
}

}  // namespace lambo
