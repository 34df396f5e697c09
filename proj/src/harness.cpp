#include "lambo/harness.hpp"

#include "lambo/errors.hpp"

#include "json.hpp"
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace lambo {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError("'" + key + "' must be a scalar", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("'" + key + "' has an invalid value '" + n.Scalar() + "'", line_of(n));
  }
}

bool boolean(const YAML::Node& n, const std::string& key) { return scalar<bool>(n, key); }

template <class T>
std::vector<T> sequence(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ConfigError("'" + key + "' must be a list", line_of(n));
  std::vector<T> out;
  for (const auto& e : n) out.push_back(scalar<T>(e, key));
  return out;
}

void range_check(bool ok, const YAML::Node& n, const std::string& what) {
  if (!ok) throw ConfigError(what, line_of(n));
}

void apply_toggle(ExperimentConfig& c, const std::string& name, const YAML::Node& v) {
  auto& h = c.lambo.heuristics;
  const std::string key = "toggles." + name;
  if (name == "restart") h.restart = boolean(v, key);
  else if (name == "discard") h.discard = boolean(v, key);
  else if (name == "refine") h.refine = boolean(v, key);
  else if (name == "depth_growth") h.depth_growth = boolean(v, key);
  else if (name == "refit") h.refit = boolean(v, key);
  else if (name == "full_information") c.lambo.full_information = boolean(v, key);
  else throw ConfigError("unknown key '" + key + "'", line_of(v));
}

void apply_lambo(ExperimentConfig& c, const std::string& name, const YAML::Node& v) {
  auto& l = c.lambo;
  const std::string key = "lambo." + name;
  if (name == "eta") {
    l.eta = scalar<double>(v, key);
    range_check(std::isfinite(l.eta), v, key + " must be finite");
  } else if (name == "restart_epoch") {
    l.restart_epoch = scalar<int>(v, key);
    range_check(l.restart_epoch >= 1, v, key + " must be >= 1");
  } else if (name == "depth_growth_period") {
    l.depth_growth_period = scalar<int>(v, key);
    range_check(l.depth_growth_period >= 1, v, key + " must be >= 1");
  } else if (name == "switch_threshold") {
    l.switch_threshold = scalar<double>(v, key);
    range_check(l.switch_threshold > 0.0 && l.switch_threshold <= 1.0, v, key + " must lie in (0, 1]");
  } else if (name == "discard_factor") {
    l.discard_factor = scalar<double>(v, key);
    range_check(l.discard_factor > 0.0 && l.discard_factor <= 1.0, v, key + " must lie in (0, 1]");
  } else if (name == "max_refinements") {
    l.max_refinements = scalar<int>(v, key);
    range_check(l.max_refinements >= 0, v, key + " must be >= 0");
  } else if (name == "depth_mode") {
    try {
      l.depth_mode = depth_mode_from_string(scalar<std::string>(v, key));
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what(), line_of(v));
    }
  } else {
    throw ConfigError("unknown key '" + key + "'", line_of(v));
  }
}

void apply_model(ExperimentConfig& c, const std::string& name, const YAML::Node& v) {
  auto& m = c.lambo.model;
  const std::string key = "model." + name;
  try {
    if (name == "kernel") {
      m.family = kernel_family_from_string(scalar<std::string>(v, key));
      m.acquisition.family = m.family;
    } else if (name == "prior_mean") {
      m.prior_mean = prior_mean_from_string(scalar<std::string>(v, key));
    } else if (name == "standardize") {
      m.standardize = scalar<bool>(v, key);
    } else if (name == "noise_variance") {
      m.noise = scalar<double>(v, key);
      range_check(m.noise >= 0.0, v, key + " must be >= 0");
    } else if (name == "initial_lengthscale") {
      m.initial_lengthscale = scalar<double>(v, key);
      range_check(m.initial_lengthscale > 0.0, v, key + " must be > 0");
    } else if (name == "max_points") {
      const long n = scalar<long>(v, key);
      range_check(n == 0 || n >= 8, v, key + " must be 0 (unlimited) or >= 8");
      m.max_points = static_cast<std::size_t>(n);
    } else if (name == "refit_period") {
      m.refit_period = scalar<int>(v, key);
      range_check(m.refit_period >= 1, v, key + " must be >= 1");
    } else if (name == "beta_mode") {
      const auto s = scalar<std::string>(v, key);
      if (s == "practical") m.acquisition.mode = BetaMode::Practical;
      else if (s == "theoretical") m.acquisition.mode = BetaMode::Theoretical;
      else throw ConfigError(key + " must be practical or theoretical", line_of(v));
    } else if (name == "beta_scale") {
      m.acquisition.scale = scalar<double>(v, key);
      range_check(m.acquisition.scale >= 0.0, v, key + " must be >= 0");
    } else if (name == "delta") {
      m.acquisition.delta = scalar<double>(v, key);
      range_check(m.acquisition.delta < 1.0, v, key + " must be < 1");
    } else if (name == "candidates_per_dim") {
      m.solver.candidates_per_dim = scalar<int>(v, key);
      range_check(m.solver.candidates_per_dim >= 1, v, key + " must be >= 1");
    } else if (name == "sweeps") {
      m.solver.sweeps = scalar<int>(v, key);
      range_check(m.solver.sweeps >= 0, v, key + " must be >= 0");
    } else {
      throw ConfigError("unknown key '" + key + "'", line_of(v));
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what(), line_of(v));
  }
}

template <class F>
void for_each_entry(const YAML::Node& map, const std::string& key, F&& f) {
  if (!map.IsMap()) throw ConfigError("'" + key + "' must be a mapping", line_of(map));
  for (const auto& kv : map) f(kv.first.as<std::string>(), kv.second, kv.first);
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) s += (s.empty() ? "" : ",") + e;
  return s;
}

template <class T>
std::string join_num(const std::vector<T>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    if constexpr (std::is_floating_point_v<T>) os << format_double(v[i]);
    else os << v[i];
  }
  os << ']';
  return os.str();
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("malformed YAML: " + e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping", line_of(root));

  ExperimentConfig c;
  bool lambda_set = false, noise_set = false;
  std::set<std::string> seen;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    const int line = line_of(kv.first);
    seen.insert(key);
    if (key == "preset") {
      c.preset = scalar<std::string>(v, key);
    } else if (key == "objective") {
      c.objective = scalar<std::string>(v, key);
    } else if (key == "split") {
      c.split = sequence<int>(v, key);
      for (int d : c.split) range_check(d >= 1, v, "split entries must be >= 1");
    } else if (key == "costs") {
      c.costs = sequence<double>(v, key);
      for (double x : c.costs) range_check(x >= 0.0 && std::isfinite(x), v, "costs must be finite and >= 0");
    } else if (key == "methods") {
      c.methods = sequence<std::string>(v, key);
      range_check(!c.methods.empty(), v, "methods must not be empty");
      for (const auto& m : c.methods) {
        try {
          method_from_string(m);
        } catch (const InvalidInput& e) {
          throw ConfigError(e.what(), line_of(v));
        }
      }
      std::set<std::string> uniq(c.methods.begin(), c.methods.end());
      range_check(uniq.size() == c.methods.size(), v, "methods must not repeat");
    } else if (key == "horizon") {
      c.horizon = scalar<long>(v, key);
      range_check(c.horizon >= 0, v, "horizon must be >= 0");
    } else if (key == "replications") {
      c.replications = scalar<long>(v, key);
      range_check(c.replications >= 1, v, "replications must be >= 1");
    } else if (key == "seed") {
      c.seed = scalar<std::uint64_t>(v, key);
    } else if (key == "lambda") {
      c.lambda = scalar<double>(v, key);
      range_check(c.lambda >= 0.0 && std::isfinite(c.lambda), v, "lambda must be finite and >= 0");
      lambda_set = true;
    } else if (key == "output") {
      c.output = scalar<std::string>(v, key);
    } else if (key == "noise") {
      c.noise = scalar<double>(v, key);
      range_check(c.noise >= 0.0 && std::isfinite(c.noise), v, "noise must be finite and >= 0");
      noise_set = true;
    } else if (key == "initial_samples") {
      c.initial_samples = scalar<int>(v, key);
      range_check(c.initial_samples >= 0, v, "initial_samples must be >= 0");
    } else if (key == "toggles") {
      for_each_entry(v, key, [&](const std::string& k, const YAML::Node& val, const YAML::Node&) { apply_toggle(c, k, val); });
    } else if (key.rfind("toggles.", 0) == 0) {
      apply_toggle(c, key.substr(8), v);
    } else if (key == "lambo") {
      for_each_entry(v, key, [&](const std::string& k, const YAML::Node& val, const YAML::Node&) { apply_lambo(c, k, val); });
    } else if (key.rfind("lambo.", 0) == 0) {
      apply_lambo(c, key.substr(6), v);
    } else if (key == "model") {
      for_each_entry(v, key, [&](const std::string& k, const YAML::Node& val, const YAML::Node&) { apply_model(c, k, val); });
    } else if (key.rfind("model.", 0) == 0) {
      apply_model(c, key.substr(6), v);
    } else {
      throw ConfigError("unknown key '" + key + "'", line);
    }
  }

  if (c.methods.empty()) throw ConfigError("missing required key 'methods'", 0);
  if (!c.preset.empty()) {
    if (!c.objective.empty() || !c.split.empty() || !c.costs.empty())
      throw ConfigError("give either 'preset' or 'objective'/'split'/'costs', not both", line_of(root["preset"]));
    const Preset* p = nullptr;
    try {
      p = &preset(c.preset);
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what(), line_of(root["preset"]));
    }
    if (!lambda_set) c.lambda = p->lambda;
    if (!noise_set) c.noise = p->objective.noise_std;
  } else {
    if (c.objective.empty()) throw ConfigError("missing 'preset' (or 'objective' with 'split' and 'costs')", 0);
    try {
      const auto spec = base_objective(function_from_string(c.objective));
      if (c.split.empty()) throw ConfigError("explicit objective needs 'split'", line_of(root["objective"]));
      int total = 0;
      for (int d : c.split) total += d;
      if (total != spec.dimension)
        throw ConfigError("split sums to " + std::to_string(total) + " but " + c.objective + " has dimension " +
                              std::to_string(spec.dimension),
                          line_of(root["split"]));
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what(), line_of(root["objective"]));
    }
    const std::size_t n = c.split.size();
    if (c.costs.size() == n && n > 0) c.costs.pop_back();  // trailing cost of the free module
    if (c.costs.size() + 1 != n)
      throw ConfigError("costs must list " + std::to_string(n - 1) + " (or " + std::to_string(n) + ") values",
                        line_of(root["costs"]));
  }
  c.lambo.horizon = c.horizon;
  c.lambo.initial_samples = c.initial_samples;
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::effective() const {
  const auto& l = lambo;
  const auto& m = lambo.model;
  const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  std::vector<std::pair<std::string, std::string>> e;
  if (!preset.empty()) e.emplace_back("preset", preset);
  else {
    e.emplace_back("objective", objective);
    e.emplace_back("split", join_num(split));
    e.emplace_back("costs", join_num(costs));
  }
  e.emplace_back("methods", "[" + join(methods) + "]");
  e.emplace_back("horizon", std::to_string(horizon));
  e.emplace_back("replications", std::to_string(replications));
  e.emplace_back("seed", std::to_string(seed));
  e.emplace_back("lambda", format_double(lambda));
  e.emplace_back("output", output);
  e.emplace_back("noise", format_double(noise));
  e.emplace_back("initial_samples", std::to_string(initial_samples));
  e.emplace_back("toggles.restart", b(l.heuristics.restart));
  e.emplace_back("toggles.discard", b(l.heuristics.discard));
  e.emplace_back("toggles.refine", b(l.heuristics.refine));
  e.emplace_back("toggles.depth_growth", b(l.heuristics.depth_growth));
  e.emplace_back("toggles.refit", b(l.heuristics.refit));
  e.emplace_back("toggles.full_information", b(l.full_information));
  e.emplace_back("lambo.eta", format_double(l.eta));
  e.emplace_back("lambo.restart_epoch", std::to_string(l.restart_epoch));
  e.emplace_back("lambo.depth_growth_period", std::to_string(l.depth_growth_period));
  e.emplace_back("lambo.switch_threshold", format_double(l.switch_threshold));
  e.emplace_back("lambo.discard_factor", format_double(l.discard_factor));
  e.emplace_back("lambo.max_refinements", std::to_string(l.max_refinements));
  e.emplace_back("lambo.depth_mode", to_string(l.depth_mode));
  e.emplace_back("model.kernel", to_string(m.family));
  e.emplace_back("model.prior_mean", to_string(m.prior_mean));
  e.emplace_back("model.standardize", m.standardize ? "true" : "false");
  e.emplace_back("model.noise_variance", format_double(m.noise));
  e.emplace_back("model.initial_lengthscale", format_double(m.initial_lengthscale));
  e.emplace_back("model.max_points", std::to_string(m.max_points));
  e.emplace_back("model.refit_period", std::to_string(m.refit_period));
  e.emplace_back("model.beta_mode", m.acquisition.mode == BetaMode::Practical ? "practical" : "theoretical");
  e.emplace_back("model.beta_scale", format_double(m.acquisition.scale));
  e.emplace_back("model.delta", format_double(m.acquisition.delta));
  e.emplace_back("model.candidates_per_dim", std::to_string(m.solver.candidates_per_dim));
  e.emplace_back("model.sweeps", std::to_string(m.solver.sweeps));
  return e;
}

Problem problem_for(const ExperimentConfig& cfg) {
  Problem p;
  if (!cfg.preset.empty()) {
    p = make_problem(preset(cfg.preset));
  } else {
    p.objective = base_objective(function_from_string(cfg.objective));
    p.objective.split = cfg.split;
    p.costs.costs = cfg.costs;
    p.modules = split_box(p.objective.domain, cfg.split);
  }
  p.objective.noise_std = cfg.noise;
  p.costs.lambda = cfg.lambda;
  return p;
}

std::vector<Partition> partitions_for(const ExperimentConfig& cfg, const Problem& problem, long run_id) {
  constexpr std::uint64_t kPartitionStream = 0x9a27;
  Rng rng(derive_seed(cfg.seed, {kPartitionStream, static_cast<std::uint64_t>(run_id)}));
  std::vector<Partition> parts;
  for (std::size_t m = 0; m + 1 < problem.modules.size(); ++m) {
    const Box& b = problem.modules[m];
    const int coord = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(b.dim())));
    auto halves = bisect(b, coord);
    parts.push_back(Partition{static_cast<int>(m), {halves.first, halves.second}});
  }
  return parts;
}

BaselineConfig baseline_config(const ExperimentConfig& cfg, MethodId method) {
  BaselineConfig b;
  b.method = method;
  b.horizon = cfg.horizon;
  b.initial_samples = cfg.initial_samples;
  b.refit = cfg.lambo.heuristics.refit;
  b.model = cfg.lambo.model;
  return b;
}

RunTrace run_method(const ExperimentConfig& cfg, const Problem& problem, MethodId method, long run_id) {
  if (method == MethodId::Lambo) {
    LamboConfig lc = cfg.lambo;
    lc.horizon = cfg.horizon;
    lc.initial_samples = cfg.initial_samples;
    return run_lambo(lc, problem, partitions_for(cfg, problem, run_id), cfg.seed, run_id);
  }
  return run_baseline(baseline_config(cfg, method), problem, cfg.seed, run_id);
}

int worker_count() {
  if (const char* env = std::getenv("LAMBO_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(std::min(n, 256L));
    std::fprintf(stderr, "warning: ignoring invalid LAMBO_WORKERS='%s'\n", env);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ExperimentResult run_experiment_runs(const ExperimentConfig& cfg) {
  const Problem problem = problem_for(cfg);
  struct Job {
    std::size_t method_index;
    long run_id;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m)
    for (long r = 0; r < cfg.replications; ++r) jobs.push_back({m, r});

  std::vector<std::optional<RunTrace>> traces(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      const auto& job = jobs[j];
      try {
        traces[j] = run_method(cfg, problem, method_from_string(cfg.methods[job.method_index]), job.run_id);
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
  };
  const int workers = std::min<int>(worker_count(), static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Jobs are already laid out in (method, run_id) order.
  ExperimentResult res;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (traces[j]) res.traces.push_back(std::move(*traces[j]));
    else res.failures.push_back({cfg.methods[jobs[j].method_index], jobs[j].run_id, errors[j]});
  }
  return res;
}

std::pair<double, double> mean_stderr(const std::vector<double>& v) {
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

std::vector<CurveRow> emit_movement_regret_curve(const std::vector<RunTrace>& traces, const std::vector<long>& horizons) {
  std::vector<std::string> order;
  for (const auto& t : traces)
    if (std::find(order.begin(), order.end(), t.method) == order.end()) order.push_back(t.method);
  for (long h : horizons)
    if (h < 1) throw InvalidInput("horizons must be >= 1");
  std::vector<CurveRow> rows;
  for (const auto& method : order) {
    for (long h : horizons) {
      std::vector<double> v;
      for (const auto& t : traces) {
        if (t.method != method) continue;
        if (t.iterations() < h)
          throw InvalidInput("horizon " + std::to_string(h) + " exceeds the length of " + method + " run " +
                             std::to_string(t.run_id) + " (" + std::to_string(t.iterations()) + " iterations)");
        v.push_back(t.at(h).cum_regret_plus / static_cast<double>(h));
      }
      const auto [m, se] = mean_stderr(v);
      rows.push_back({method, h, m, se, static_cast<long>(v.size())});
    }
  }
  return rows;
}

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json series(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

}  // namespace

std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
  using nlohmann::json;
  json j;
  j["schema_version"] = 1;
  json conf = json::object();
  for (const auto& [k, v] : cfg.effective()) conf[k] = v;
  j["config"] = conf;
  j["horizon"] = cfg.horizon;
  j["replications"] = cfg.replications;
  j["seed"] = cfg.seed;
  j["lambda"] = cfg.lambda;
  j["initial_samples"] = cfg.initial_samples;
  j["init_counts_toward_horizon"] = false;
  j["init_counts_toward_cost"] = true;

  double max_cost = 0.0;
  for (const auto& t : result.traces)
    if (!t.records.empty()) max_cost = std::max(max_cost, t.records.back().cum_cost);
  constexpr int kBudgets = 50;

  json methods = json::array();
  for (const auto& method : cfg.methods) {
    std::vector<const RunTrace*> runs;
    for (const auto& t : result.traces)
      if (t.method == method) runs.push_back(&t);
    json m;
    m["name"] = method;
    m["runs"] = runs.size();
    json failures = json::array();
    for (const auto& f : result.failures)
      if (f.method == method) failures.push_back({{"run_id", f.run_id}, {"error", f.error}});
    m["failures"] = failures;

    std::vector<double> fin_regret, fin_cost, fin_rplus, fin_switch;
    for (const auto* t : runs) {
      if (t->records.empty()) continue;
      fin_regret.push_back(incumbent_regret(*t, t->horizon));
      fin_cost.push_back(t->records.back().cum_cost);
      fin_rplus.push_back(t->records.back().cum_regret_plus);
      fin_switch.push_back(static_cast<double>(module_switches(*t, 0, t->horizon)));
    }
    json fin;
    auto put = [&](const std::string& name, const std::vector<double>& v) {
      const auto [mean, se] = mean_stderr(v);
      fin[name + "_mean"] = number_or_null(mean);
      fin[name + "_stderr"] = number_or_null(se);
    };
    put("incumbent_regret", fin_regret);
    put("cum_cost", fin_cost);
    put("cum_regret_plus", fin_rplus);
    put("module1_switches", fin_switch);
    m["final"] = fin;

    // Iteration axis, t = 1..T (t = 0 is the end of initialization).
    json it;
    std::vector<double> ts, reg_m, reg_s, cost_m, cost_s, rp_m, rp_s;
    for (long t = 0; t <= cfg.horizon; ++t) {
      std::vector<double> r, c, p;
      for (const auto* tr : runs) {
        if (tr->iterations() < t || tr->records.empty()) continue;
        if (t == 0 && tr->init_records == 0) continue;
        r.push_back(incumbent_regret(*tr, t));
        c.push_back(tr->at(t).cum_cost);
        p.push_back(tr->at(t).cum_regret_plus);
      }
      if (r.empty()) continue;
      ts.push_back(static_cast<double>(t));
      auto [a, b] = mean_stderr(r);
      reg_m.push_back(a);
      reg_s.push_back(b);
      std::tie(a, b) = mean_stderr(c);
      cost_m.push_back(a);
      cost_s.push_back(b);
      std::tie(a, b) = mean_stderr(p);
      rp_m.push_back(a);
      rp_s.push_back(b);
    }
    it["t"] = series(ts);
    it["incumbent_regret_mean"] = series(reg_m);
    it["incumbent_regret_stderr"] = series(reg_s);
    it["cum_cost_mean"] = series(cost_m);
    it["cum_cost_stderr"] = series(cost_s);
    it["cum_regret_plus_mean"] = series(rp_m);
    it["cum_regret_plus_stderr"] = series(rp_s);
    m["iteration_curve"] = it;

    for (const bool with_init : {true, false}) {
      json cc;
      std::vector<double> budgets, mean_v, se_v;
      for (int b = 0; b <= kBudgets; ++b) {
        const double budget = max_cost * b / kBudgets;
        std::vector<double> r;
        for (const auto* tr : runs) {
          const double v = incumbent_regret_at_cost(*tr, budget, with_init);
          if (std::isfinite(v)) r.push_back(v);
        }
        budgets.push_back(budget);
        if (r.size() == runs.size() && !r.empty()) {
          const auto [a, s] = mean_stderr(r);
          mean_v.push_back(a);
          se_v.push_back(s);
        } else {
          mean_v.push_back(std::numeric_limits<double>::quiet_NaN());
          se_v.push_back(std::numeric_limits<double>::quiet_NaN());
        }
      }
      cc["budget"] = series(budgets);
      cc["incumbent_regret_mean"] = series(mean_v);
      cc["incumbent_regret_stderr"] = series(se_v);
      m[with_init ? "cost_curve" : "cost_curve_excluding_init"] = cc;
    }
    methods.push_back(m);
  }
  j["methods"] = methods;
  return j.dump(2) + "\n";
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path out(cfg.output);
  fs::create_directories(out / "traces");
  for (const auto& t : result.traces) {
    char name[128];
    std::snprintf(name, sizeof name, "%s_run%03ld.csv", t.method.c_str(), t.run_id);
    std::ofstream f(out / "traces" / name, std::ios::binary);
    write_trace_csv(f, t);
    if (!f) throw std::runtime_error("failed to write trace " + (out / "traces" / name).string());
  }
  {
    std::ofstream f(out / "summary.json", std::ios::binary);
    f << summary_json(cfg, result);
  }
  {
    std::ofstream f(out / "effective_config.yaml", std::ios::binary);
    for (const auto& [k, v] : cfg.effective()) f << k << ": " << v << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  auto res = run_experiment_runs(cfg);
  write_outputs(cfg, res);
  return res;
}

}  // namespace lambo
