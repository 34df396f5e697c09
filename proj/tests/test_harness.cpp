#include "doctest.h"

#include "lambo/errors.hpp"
#include "lambo/harness.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lambo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

RunTrace flat_trace(const std::string& method, long run_id, long horizon, double regret, double gamma) {
  RunTrace t;
  t.method = method;
  t.run_id = run_id;
  t.lambda = 0.5;
  for (long s = 1; s <= horizon; ++s) {
    TraceRecord r;
    r.t = s;
    r.x = Vector::Zero(1);
    r.simple_regret = regret;
    r.gamma = gamma;
    push_record(t, r);
  }
  t.horizon = horizon;
  return t;
}

}  // namespace

TEST_CASE("minimal config takes documented defaults") {
  const ExperimentConfig c = parse_config_text("preset: hartmann-2mod-10:1\nmethods: [lambo, gp-ei]\n");
  CHECK(c.horizon == 300);
  CHECK(c.replications == 100);
  CHECK(c.seed == 0);
  CHECK(c.lambda == 0.1);
  CHECK(c.initial_samples == 15);
  CHECK(c.methods == std::vector<std::string>{"lambo", "gp-ei"});
  CHECK(c.lambo.heuristics.restart);
  CHECK(c.lambo.model.noise == 0.01);

  const auto eff = c.effective();
  bool has_standardize = false;
  for (const auto& [k, v] : eff) has_standardize = has_standardize || k == "model.standardize";
  CHECK(has_standardize);
}

TEST_CASE("config errors name the key and line") {
  CHECK(error_line("preset: hartmann-2mod-10:1\nmethods: [lambo]\nhorizn: 5\n") == 3);
  CHECK(error_text("preset: hartmann-2mod-10:1\nmethods: [lambo]\nhorizn: 5\n").find("horizn") != std::string::npos);
  CHECK(error_line("preset: hartmann-2mod-10:1\nmethods: [lambo]\nreplications: 0\n") == 3);
  CHECK(error_line("preset: hartmann-2mod-10:1\nmethods: [lambo]\ntoggles:\n  restat: true\n") == 4);
  CHECK(error_line("preset: hartmann-2mod-10:1\nmethods: [lambo]\nmodel:\n  noise_variance: -1\n") == 4);
  CHECK(error_text("methods: [lambo]\npreset: nope\n").find("hartmann-2mod-10:1") != std::string::npos);
  CHECK(error_text("preset: hartmann-2mod-10:1\nmethods: [bogus]\n").find("bogus") != std::string::npos);
  CHECK(error_text("preset: hartmann-2mod-10:1\n").find("methods") != std::string::npos);
  CHECK_THROWS_AS(parse_config_text("preset: [unclosed\n"), ConfigError);
}

TEST_CASE("toggles and nested settings") {
  const ExperimentConfig c = parse_config_text(
      "preset: ackley-3mod\nmethods: [lambo]\nlambda: 1.0\ntoggles:\n  restart: false\n  full_information: true\n"
      "model:\n  max_points: 64\n  standardize: false\nlambo.restart_epoch: 7\n");
  CHECK(c.lambda == 1.0);
  CHECK_FALSE(c.lambo.heuristics.restart);
  CHECK(c.lambo.full_information);
  CHECK(c.lambo.model.max_points == 64);
  CHECK_FALSE(c.lambo.model.standardize);
  CHECK(c.lambo.restart_epoch == 7);
}

TEST_CASE("movement regret curve") {
  std::vector<RunTrace> traces{flat_trace("a", 0, 4, 0.2, 1.0), flat_trace("a", 1, 4, 0.4, 1.0)};
  // R+_t = t * (regret + 0.5 * 1), so R+_t / t is constant per run.
  const auto rows = emit_movement_regret_curve(traces, {2, 4});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mean == doctest::Approx(0.8));
  CHECK(rows[0].stderr_ == doctest::Approx(0.1));
  CHECK(rows[1].runs == 2);

  const auto single = emit_movement_regret_curve({flat_trace("b", 0, 3, 0.1, 0.0)}, {3});
  CHECK(single[0].mean == doctest::Approx(0.1));
  CHECK(single[0].stderr_ == 0.0);

  CHECK_THROWS_AS(emit_movement_regret_curve(traces, {5}), InvalidInput);
  CHECK_THROWS_AS(emit_movement_regret_curve(traces, {0}), InvalidInput);
}

TEST_CASE("mean and standard error") {
  const auto [m, s] = mean_stderr({1.0, 2.0, 3.0, 4.0});
  CHECK(m == 2.5);
  CHECK(s == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("experiment outputs are reproducible byte for byte") {
  const fs::path root = fs::temp_directory_path() / "lambo-harness-test";
  fs::remove_all(root);
  const std::string base = "preset: griewank-2mod-10:1\nmethods: [random, lambo]\nhorizon: 10\nreplications: 2\nseed: 5\n"
                           "model:\n  candidates_per_dim: 16\n";
  ExperimentConfig a = parse_config_text(base + "output: " + (root / "a").string() + "\n");
  ExperimentConfig b = parse_config_text(base + "output: " + (root / "b").string() + "\n");
  const auto ra = run_experiment(a);
  run_experiment(b);
  CHECK(ra.failures.empty());
  REQUIRE(ra.traces.size() == 4);
  CHECK(ra.traces[0].method == "random");
  CHECK(ra.traces[2].method == "lambo");

  for (const char* name : {"random_run000.csv", "random_run001.csv", "lambo_run000.csv", "lambo_run001.csv"}) {
    const std::string x = slurp(root / "a" / "traces" / name);
    CHECK(!x.empty());
    CHECK(x == slurp(root / "b" / "traces" / name));
  }
  CHECK(fs::exists(root / "a" / "effective_config.yaml"));

  const auto j = nlohmann::json::parse(slurp(root / "a" / "summary.json"));
  CHECK(j["horizon"] == 10);
  CHECK(j["replications"] == 2);
  REQUIRE(j["methods"].size() == 2);
  for (const auto& m : j["methods"]) {
    CHECK(m["runs"] == 2);
    CHECK(m["iteration_curve"]["t"].size() == 11);
    CHECK(m["cost_curve"]["budget"].size() == 51);
  }
  fs::remove_all(root);
}
