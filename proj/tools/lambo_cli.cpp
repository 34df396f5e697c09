// Command-line front end: run experiments, list presets, verify, build curves.

#include "lambo/harness.hpp"
#include "lambo/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace lambo;

namespace {

nlohmann::json presets_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : preset_table()) {
    const auto& o = p.objective;
    arr.push_back({{"name", p.name},
                   {"function", to_string(o.function)},
                   {"dimension", o.dimension},
                   {"domain", {{"lo", o.domain.lo[0]}, {"hi", o.domain.hi[0]}}},
                   {"split", o.split},
                   {"module_costs", p.module_costs},
                   {"lambda", p.lambda},
                   {"noise_std", o.noise_std},
                   {"f_min", o.f_min},
                   {"f_max", o.f_max},
                   {"f_max_source", o.max_note},
                   {"optimizer", std::vector<double>(o.optimizer.data(), o.optimizer.data() + o.optimizer.size())}});
  }
  return arr;
}

std::vector<RunTrace> load_traces(const fs::path& dir) {
  fs::path d = dir;
  if (fs::is_directory(d / "traces")) d /= "traces";
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(d))
    if (e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<RunTrace> traces;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    traces.push_back(read_trace_csv(in));
  }
  return traces;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LaMBO: switch-cost-aware Bayesian optimization and benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment described by a YAML config");
  run->add_option("config", config_path, "experiment config file")->required();

  bool as_json = false;
  auto* presets = app.add_subcommand("presets", "list registered presets");
  presets->add_flag("--json", as_json, "print the preset table as JSON");

  bool full = false;
  std::vector<int> only;
  std::uint64_t seed = VerifyOptions{}.seed;
  auto* verify = app.add_subcommand("verify", "run the invariant and acceptance checks");
  verify->add_flag("--full", full, "include the comparative experiments (slow)");
  verify->add_option("--only", only, "check ids to run")->delimiter(',');
  verify->add_option("--seed", seed, "master seed");

  std::string trace_dir;
  std::vector<long> horizons;
  auto* curve = app.add_subcommand("curve", "average movement regret R+_T/T at several horizons");
  curve->add_option("dir", trace_dir, "experiment output or trace directory")->required();
  curve->add_option("--horizons", horizons, "comma-separated horizons")->delimiter(',')->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = parse_config(config_path);
      const auto res = run_experiment(cfg);
      std::cout << "wrote " << res.traces.size() << " traces to " << cfg.output << '\n';
      for (const auto& f : res.failures)
        std::cerr << "run failed: " << f.method << " run " << f.run_id << ": " << f.error << '\n';
      return res.failures.empty() ? 0 : 3;
    }
    if (*presets) {
      if (as_json) {
        std::cout << presets_json().dump(2) << '\n';
      } else {
        for (const auto& p : preset_table()) {
          std::cout << p.name << "  " << to_string(p.objective.function) << " D=" << p.objective.dimension
                    << " split=";
          for (std::size_t i = 0; i < p.objective.split.size(); ++i)
            std::cout << (i ? "," : "") << p.objective.split[i];
          std::cout << " costs=";
          for (std::size_t i = 0; i < p.module_costs.size(); ++i) std::cout << (i ? "," : "") << p.module_costs[i];
          std::cout << " lambda=" << p.lambda << '\n';
        }
      }
      return 0;
    }
    if (*verify) {
      VerifyOptions opts;
      opts.seed = seed;
      opts.log = &std::cerr;
      const auto ids = !only.empty() ? only : (full ? all_criteria() : quick_criteria());
      bool ok = true;
      for (const auto& r : run_verification(ids, opts)) {
        std::cout << format_result(r) << '\n';
        ok = ok && r.pass;
      }
      return ok ? 0 : 1;
    }
    if (*curve) {
      const auto rows = emit_movement_regret_curve(load_traces(trace_dir), horizons);
      std::cout << "method,T,mean_rplus_over_T,stderr,runs\n";
      for (const auto& r : rows)
        std::cout << r.method << ',' << r.horizon << ',' << format_double(r.mean) << ',' << format_double(r.stderr_)
                  << ',' << r.runs << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
