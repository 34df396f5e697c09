#include "lambo/engine.hpp"

#include "lambo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lambo {

std::string to_string(DepthMode m) { return m == DepthMode::FixedOne ? "fixed-1" : "cost-derived"; }

DepthMode depth_mode_from_string(const std::string& s) {
  if (s == "fixed-1") return DepthMode::FixedOne;
  if (s == "cost-derived") return DepthMode::CostDerived;
  throw InvalidInput("unknown depth mode '" + s + "' (expected fixed-1 or cost-derived)");
}

std::string to_string(MethodId m) {
  switch (m) {
    case MethodId::Lambo: return "lambo";
    case MethodId::GpUcb: return "gp-ucb";
    case MethodId::GpEi: return "gp-ei";
    case MethodId::Random: return "random";
    case MethodId::EiPerCost: return "ei-per-cost";
  }
  return "unknown";
}

MethodId method_from_string(const std::string& s) {
  for (auto m : {MethodId::Lambo, MethodId::GpUcb, MethodId::GpEi, MethodId::Random, MethodId::EiPerCost})
    if (to_string(m) == s) return m;
  throw InvalidInput("unknown method '" + s + "' (expected lambo, gp-ucb, gp-ei, random or ei-per-cost)");
}

std::uint64_t init_seed(std::uint64_t master, long run_id) {
  return derive_seed(master, {static_cast<std::uint64_t>(Stream::Init), static_cast<std::uint64_t>(run_id)});
}

std::uint64_t method_seed(std::uint64_t master, MethodId method, long run_id, Stream s) {
  return derive_seed(master, {static_cast<std::uint64_t>(method), static_cast<std::uint64_t>(run_id),
                              static_cast<std::uint64_t>(s)});
}

void LamboConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidInput("LaMBO config: " + what); };
  if (horizon < 0) fail("horizon must be >= 0");
  if (initial_samples < 0) fail("initial_samples must be >= 0");
  if (restart_epoch < 1 || depth_growth_period < 1 || model.refit_period < 1) fail("periods must be >= 1");
  if (!(switch_threshold > 0.0 && switch_threshold <= 1.0)) fail("switch_threshold must lie in (0, 1]");
  if (!(discard_factor > 0.0 && discard_factor <= 1.0)) fail("discard_factor must lie in (0, 1]");
  if (max_refinements < 0) fail("max_refinements must be >= 0");
  if (!std::isfinite(eta)) fail("eta must be finite");
  if (!(model.noise >= 0.0)) fail("noise must be >= 0");
  if (!(model.initial_lengthscale > 0.0)) fail("initial_lengthscale must be > 0");
  if (model.solver.candidates_per_dim < 1 || model.solver.sweeps < 0) fail("solver settings out of range");
}

Problem make_problem(const Preset& p) { return Problem{p.objective, p.cost_model(), p.module_boxes()}; }

std::optional<std::size_t> first_differing_module(const Mset& tree, ArmId now, ArmId prev) {
  const auto& a = tree.arm_cells(now);
  const auto& b = tree.arm_cells(prev);
  for (std::size_t m = 0; m < a.size(); ++m)
    if (a[m] != b[m]) return m;
  return std::nullopt;
}

Box lazy_region(const Mset& tree, const std::vector<Box>& modules, ArmId arm, const ModularPoint* prev,
                std::size_t m) {
  const std::size_t n = modules.size();
  if (tree.num_modules() + 1 != n) throw InvalidInput("lazy_region: tree and module list disagree");
  if (m > 0 && prev == nullptr) throw InvalidInput("lazy_region: pinned blocks need a previous point");
  const int dim = std::accumulate(modules.begin(), modules.end(), 0, [](int s, const Box& b) { return s + b.dim(); });
  Vector lo(dim), hi(dim);
  const auto& cells = tree.arm_cells(arm);
  int off = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const int d = modules[j].dim();
    if (j < m) {
      lo.segment(off, d) = prev->blocks[j];
      hi.segment(off, d) = prev->blocks[j];
    } else if (j + 1 < n) {
      const Box& c = tree.partitions()[j].cells[cells[j]];
      lo.segment(off, d) = c.lo;
      hi.segment(off, d) = c.hi;
    } else {
      lo.segment(off, d) = modules[j].lo;
      hi.segment(off, d) = modules[j].hi;
    }
    off += d;
  }
  return Box(std::move(lo), std::move(hi));
}

namespace {

std::vector<int> split_of(const std::vector<Box>& modules) {
  std::vector<int> s;
  for (const auto& b : modules) s.push_back(b.dim());
  return s;
}

ArmId arm_containing(const Mset& tree, const ModularPoint& x) {
  std::vector<std::size_t> cells(tree.num_modules());
  for (std::size_t m = 0; m < cells.size(); ++m) {
    const auto& part = tree.partitions()[m];
    cells[m] = part.locate(x.blocks[m]);
    if (cells[m] == part.cells.size())
      throw ContractViolation("point lies outside every cell of module " + std::to_string(m));
  }
  return tree.arm_of(cells);
}

int min_depth(std::size_t cells) {
  int d = 0;
  while ((std::size_t{1} << d) < cells) ++d;
  return d;
}

}  // namespace

LazyCandidate lazy_base_loss(const GaussianProcess& gp, const ModelConfig& model, const Mset& tree,
                             const std::vector<Box>& modules, ArmId arm, ArmId prev_arm,
                             const ModularPoint* x_prev, long t, Rng& rng) {
  LazyCandidate c;
  c.module = x_prev ? first_differing_module(tree, arm, prev_arm).value_or(modules.size() - 1) : 0;
  const Box region = lazy_region(tree, modules, arm, x_prev, c.module);
  const Minimum best = minimize_acquisition(gp, model.acquisition, region, t, model.solver, rng);
  c.acquisition = best.value;
  c.point = ModularPoint::from_flat(best.argmin, split_of(modules));
  for (std::size_t j = 0; j < c.module; ++j) c.point.blocks[j] = x_prev->blocks[j];
  return c;
}

std::vector<double> normalize_base_losses(std::span<const double> values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return normalize_base_losses(values, *lo, *hi);
}

std::vector<double> normalize_base_losses(std::span<const double> values, double lo, double hi) {
  const double range = hi - lo;
  std::vector<double> out(values.size(), 0.5);
  if (!(range > 1e-12 * std::max(1.0, std::abs(hi)))) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::clamp((values[i] - lo) / range, 0.0, 1.0);
  return out;
}

InitialDesign initial_design(const Problem& problem, int count, std::uint64_t seed) {
  Rng rng(seed);
  InitialDesign d;
  const Box& dom = problem.objective.domain;
  for (int k = 0; k < count; ++k) {
    Vector x(dom.dim());
    for (int i = 0; i < dom.dim(); ++i) x[i] = dom.lo[i] + uniform01(rng) * (dom.hi[i] - dom.lo[i]);
    d.values.push_back(evaluate(problem.objective, x, rng));
    d.points.push_back(std::move(x));
  }
  return d;
}

// ---------------------------------------------------------------------------

LamboRun::LamboRun(LamboConfig cfg, Problem problem, std::vector<Partition> partitions, std::uint64_t master_seed,
                   long run_id)
    : cfg_(std::move(cfg)),
      problem_(std::move(problem)),
      master_seed_(master_seed),
      run_id_(run_id),
      model_(cfg_.model, problem_.objective.domain),
      solver_rng_(method_seed(master_seed, MethodId::Lambo, run_id, Stream::Solver)),
      noise_rng_(method_seed(master_seed, MethodId::Lambo, run_id, Stream::Noise)) {
  cfg_.validate();
  const std::size_t n = problem_.num_modules();
  if (n < 2) throw InvalidInput("LaMBO needs at least two modules");
  if (partitions.size() + 1 != n)
    throw InvalidInput("LaMBO: expected " + std::to_string(n - 1) + " partitions, got " +
                       std::to_string(partitions.size()));
  if (problem_.costs.costs.size() + 1 != n) throw InvalidInput("LaMBO: cost vector does not match module count");
  const auto split = split_of(problem_.modules);
  if (std::accumulate(split.begin(), split.end(), 0) != problem_.objective.dimension)
    throw InvalidInput("LaMBO: module dimensions do not sum to the objective dimension");

  cfg_.model.acquisition.dimension = problem_.objective.dimension;
  cfg_.model.acquisition.horizon = std::max(cfg_.horizon, 1L);

  auto depths = initial_depths(partitions);
  tree_ = std::make_shared<const Mset>(construct_mset(std::move(partitions), std::move(depths)));
  const double eta = cfg_.eta > 0.0 ? cfg_.eta : theoretical_learning_rate(*tree_, std::max(cfg_.horizon, 1L));
  smb_ = make_smb(tree_, eta, Rng(method_seed(master_seed, MethodId::Lambo, run_id, Stream::Bandit)));
  window_switches_.assign(n - 1, 0);
  last_loss_.assign(tree_->num_arms(), 0.5);

  trace_.method = "lambo";
  trace_.run_id = run_id;
  trace_.seed = master_seed;
  trace_.horizon = cfg_.horizon;
  trace_.lambda = problem_.costs.lambda;
  trace_.f_star = registered_optimum(problem_.objective);
  trace_.f_star_registered = true;
  trace_.config = {{"eta", format_double(eta)},
                   {"initial_samples", std::to_string(cfg_.initial_samples)},
                   {"init_counts_toward_horizon", "false"},
                   {"init_counts_toward_cost", "true"},
                   {"depth_mode", to_string(cfg_.depth_mode)},
                   {"full_information", cfg_.full_information ? "true" : "false"}};
  initialize();
}

std::vector<int> LamboRun::initial_depths(const std::vector<Partition>& parts) const {
  std::vector<int> depths(parts.size(), 1);
  if (cfg_.depth_mode == DepthMode::CostDerived && problem_.costs.lambda > 0.0) {
    std::size_t leaves = 1;
    for (const auto& p : parts) leaves *= p.cells.size();
    try {
      depths = depth_from_costs(problem_.costs.costs, problem_.costs.lambda, std::max(cfg_.horizon, 1L), leaves).depths;
    } catch (const HorizonTooSmall&) {
      // Too short a horizon for the cost-derived schedule; keep depth 1.
    } catch (const InvalidInput&) {
    }
  }
  for (std::size_t m = 0; m < parts.size(); ++m) depths[m] = std::max(depths[m], min_depth(parts[m].cells.size()));
  return depths;
}

void LamboRun::initialize() {
  const auto design = initial_design(problem_, cfg_.initial_samples, init_seed(master_seed_, run_id_));
  const double total = problem_.costs.total();
  const long count = static_cast<long>(design.points.size());
  for (long k = 0; k < count; ++k) {
    const auto& x = design.points[static_cast<std::size_t>(k)];
    TraceRecord r;
    r.t = k + 1 - count;
    r.x = x;
    r.y = design.values[static_cast<std::size_t>(k)];
    r.f_true = true_value(problem_.objective, x);
    r.gamma = total;
    r.simple_regret = r.f_true - trace_.f_star;
    r.changed_module = 0;
    push_record(trace_, std::move(r));
    model_.add(x, design.values[static_cast<std::size_t>(k)]);
  }
  trace_.init_records = count;
  trace_.init_cost = total * static_cast<double>(count);
  if (count > 0) {
    x_prev_ = ModularPoint::from_flat(design.points.back(), split_of(problem_.modules));
    smb_.prev_arm = arm_containing(*tree_, *x_prev_);
    smb_.prev_level = tree_->height();
  }
  if (cfg_.heuristics.refit) model_.refit();
}

void LamboRun::track_range(double v) {
  run_min_ = have_range_ ? std::min(run_min_, v) : v;
  run_max_ = have_range_ ? std::max(run_max_, v) : v;
  have_range_ = true;
}

void LamboRun::step() {
  ++t_;
  const Mset& tree = *tree_;
  const std::size_t k = tree.num_arms();
  const ModularPoint* prev = x_prev_ ? &*x_prev_ : nullptr;
  const ArmId prev_arm = smb_.prev_arm;

  auto candidate_for = [&](ArmId i) {
    return lazy_base_loss(model_.gp(), cfg_.model, tree, problem_.modules, i, prev_arm, prev, t_, solver_rng_);
  };

  std::vector<std::optional<LazyCandidate>> cands(k);
  std::vector<double> base(k, 1.0);
  ArmId arm = 0;
  if (cfg_.full_information) {
    std::vector<ArmId> live;
    std::vector<double> values;
    for (ArmId i = 0; i < k; ++i) {
      if (!(smb_.p[i] > 0.0)) continue;
      cands[i] = candidate_for(i);
      live.push_back(i);
      values.push_back(cands[i]->acquisition);
    }
    for (double v : values) track_range(v);
    const auto losses = normalize_base_losses(values, run_min_, run_max_);
    for (std::size_t j = 0; j < live.size(); ++j) base[live[j]] = losses[j];
    arm = sample_arm(smb_);
    if (!cands[arm]) cands[arm] = candidate_for(arm);
  } else {
    arm = sample_arm(smb_);
    cands[arm] = candidate_for(arm);
    const double a = cands[arm]->acquisition;
    track_range(a);
    last_loss_[arm] = normalize_base_losses(std::span(&a, 1), run_min_, run_max_)[0];
    base = last_loss_;
  }

  const LazyCandidate& cand = *cands[arm];
  const ModularPoint& x = cand.point;
  if (prev)
    for (std::size_t j = 0; j < cand.module; ++j)
      if (!same_block(x.blocks[j], prev->blocks[j]))
        throw ContractViolation("laziness broken: block " + std::to_string(j) + " moved at iteration " +
                                std::to_string(t_));

  const Vector flat = x.flatten();
  double y = 0.0, f_true = 0.0;
  try {
    y = evaluate(problem_.objective, flat, noise_rng_);
    f_true = true_value(problem_.objective, flat);
  } catch (const std::exception& e) {
    trace_.error = e.what();
    throw ObjectiveError(e.what(), t_);
  }

  const LevelDraw draw = draw_levels(smb_);
  const LossEstimate est = loss_estimator(smb_, base, draw);
  if (!loss_bounds_hold(est, draw))
    throw ContractViolation("loss estimates left their bounds at iteration " + std::to_string(t_));
  multiplicative_update(smb_, est.ltilde);
  smb_.prev_arm = arm;
  smb_.prev_level = draw.level;

  model_.add(flat, y);

  TraceRecord r;
  r.t = t_;
  r.arm = static_cast<long>(arm);
  r.level = draw.level;
  r.x = flat;
  r.y = y;
  r.f_true = f_true;
  r.simple_regret = f_true - trace_.f_star;
  if (prev) {
    r.gamma = movement_cost(x, *prev, problem_.costs);
    const auto changed = first_changed_block(x, *prev);
    r.changed_module = changed ? static_cast<int>(*changed) : -1;
    // Blocks before m are frozen, so only modules from m onward may be charged.
    double allowed = 0.0;
    for (std::size_t j = cand.module; j < problem_.costs.costs.size(); ++j) allowed += problem_.costs.costs[j];
    if (r.gamma > allowed)
      throw ContractViolation("movement cost exceeds the lazy suffix at iteration " + std::to_string(t_));
    for (std::size_t j = 0; j + 1 < problem_.num_modules(); ++j)
      if (!same_block(x.blocks[j], prev->blocks[j])) ++window_switches_[j];
  } else {
    r.gamma = problem_.costs.total();
    r.changed_module = 0;
    for (auto& w : window_switches_) ++w;
  }
  push_record(trace_, std::move(r));
  x_prev_ = x;

  if (cfg_.heuristics.refit && t_ % cfg_.model.refit_period == 0) model_.refit();
  if (t_ % cfg_.depth_growth_period == 0) {
    if (cfg_.heuristics.depth_growth) grow_depths();
    std::fill(window_switches_.begin(), window_switches_.end(), 0);
  }
  if (t_ % cfg_.restart_epoch == 0) restart();
}

void LamboRun::grow_depths() {
  std::vector<int> depths = tree_->depths();
  long grown = 0;
  for (std::size_t m = 0; m < depths.size(); ++m) {
    const double freq = static_cast<double>(window_switches_[m]) / cfg_.depth_growth_period;
    if (freq > cfg_.switch_threshold) {
      ++depths[m];
      ++grown;
    }
  }
  if (grown == 0) return;
  trace_.depth_increments += grown;
  rebuild_tree(tree_->partitions(), std::move(depths), smb_.p);
}

void LamboRun::restart() {
  // Discarding is paired with bisecting the survivors; once refinement is
  // exhausted a further discard could leave a single arm and freeze module 1.
  const bool can_refine = cfg_.heuristics.refine && refinements_ < cfg_.max_refinements;
  if (cfg_.heuristics.discard && (can_refine || !cfg_.heuristics.refine)) {
    const double threshold = cfg_.discard_factor / static_cast<double>(tree_->num_arms());
    const auto res = discard_arms(smb_, threshold);
    trace_.discarded_arms += static_cast<long>(res.removed.size());
    if (can_refine && !res.removed.empty()) {
      // Keep only cells still used by a live arm and bisect each of them.
      const Mset& tree = *tree_;
      std::vector<Partition> parts;
      std::vector<int> depths = tree.depths();
      for (std::size_t m = 0; m < tree.num_modules(); ++m) {
        std::vector<char> used(tree.partitions()[m].cells.size(), 0);
        for (ArmId a = 0; a < tree.num_arms(); ++a)
          if (smb_.p[a] > 0.0) used[tree.arm_cells(a)[m]] = 1;
        Partition part;
        part.module = static_cast<int>(m);
        for (std::size_t c = 0; c < used.size(); ++c) {
          if (!used[c]) continue;
          Partition one{part.module, {tree.partitions()[m].cells[c]}};
          const Partition halves = refine_partition(one, 0);
          part.cells.insert(part.cells.end(), halves.cells.begin(), halves.cells.end());
        }
        depths[m] = std::max(depths[m], min_depth(part.cells.size()));
        parts.push_back(std::move(part));
      }
      ++refinements_;
      ++trace_.refinements;
      rebuild_tree(std::move(parts), std::move(depths), smb_.p);
    }
  }
  if (cfg_.heuristics.restart) refresh_probabilities(smb_);
}

void LamboRun::rebuild_tree(std::vector<Partition> parts, std::vector<int> depths, const std::vector<double>& old_p) {
  const Mset& old = *tree_;
  const int old_h = old.height();
  auto fresh = std::make_shared<const Mset>(construct_mset(std::move(parts), std::move(depths)));

  // Each new arm descends from the old arm whose cells contain its cells.
  std::vector<ArmId> parent(fresh->num_arms());
  std::vector<std::size_t> children(old.num_arms(), 0);
  for (ArmId a = 0; a < fresh->num_arms(); ++a) {
    std::vector<std::size_t> cells(old.num_modules());
    for (std::size_t m = 0; m < old.num_modules(); ++m) {
      const Box& c = fresh->partitions()[m].cells[fresh->arm_cells(a)[m]];
      const Vector centre = 0.5 * (c.lo + c.hi);
      cells[m] = old.partitions()[m].locate(centre);
      if (cells[m] == old.partitions()[m].cells.size())
        throw ContractViolation("refined cell is not inside any previous cell");
    }
    parent[a] = old.arm_of(cells);
    ++children[parent[a]];
  }
  std::vector<double> p(fresh->num_arms(), 0.0);
  for (ArmId a = 0; a < fresh->num_arms(); ++a) p[a] = old_p[parent[a]] / static_cast<double>(children[parent[a]]);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total > 0.0)
    for (double& v : p) v /= total;

  const ArmId prev_old = smb_.prev_arm;
  tree_ = fresh;
  smb_.tree = fresh;
  smb_.p = std::move(p);
  if (x_prev_) {
    smb_.prev_arm = arm_containing(*fresh, *x_prev_);
  } else {
    smb_.prev_arm = static_cast<ArmId>(std::find(parent.begin(), parent.end(), prev_old) - parent.begin());
  }
  smb_.prev_level = smb_.prev_level >= old_h ? fresh->height() : std::min(smb_.prev_level, fresh->height());
  last_loss_.assign(fresh->num_arms(), 0.5);
}

void LamboRun::run_to_horizon() {
  while (t_ < cfg_.horizon) step();
}

RunTrace LamboRun::take_trace() {
  trace_.zero_mass_fallbacks = smb_.zero_mass_fallbacks;
  trace_.unguarded_updates = smb_.unguarded_updates;
  trace_.final_arms = static_cast<long>(std::count_if(smb_.p.begin(), smb_.p.end(), [](double v) { return v > 0.0; }));
  return std::move(trace_);
}

RunTrace run_lambo(const LamboConfig& cfg, const Problem& problem, std::vector<Partition> partitions,
                   std::uint64_t master_seed, long run_id) {
  LamboRun run(cfg, problem, std::move(partitions), master_seed, run_id);
  run.run_to_horizon();
  return run.take_trace();
}

}  // namespace lambo
