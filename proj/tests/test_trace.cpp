#include "doctest.h"

#include "lambo/errors.hpp"
#include "lambo/modular.hpp"
#include "lambo/trace.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace lambo;

namespace {

ModularPoint point(std::vector<std::vector<double>> blocks) {
  ModularPoint p;
  for (const auto& b : blocks) p.blocks.push_back(Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size())));
  return p;
}

RunTrace sample_trace() {
  RunTrace t;
  t.method = "lambo";
  t.run_id = 4;
  t.lambda = 0.1;
  t.f_star = 0.0;
  const double gammas[] = {11, 11, 0, 10, 0, 0};
  const double regrets[] = {0.8, 0.5, 0.6, 0.2, 0.3, 0.1};
  for (int k = 0; k < 6; ++k) {
    TraceRecord r;
    r.t = k - 1;
    r.arm = k % 2;
    r.level = k % 3;
    r.x = Vector::Constant(2, 0.1 * k);
    r.f_true = regrets[k];
    r.y = regrets[k] + 0.001;
    r.gamma = gammas[k];
    r.simple_regret = regrets[k];
    r.changed_module = gammas[k] > 0 ? 0 : 1;
    push_record(t, r);
  }
  t.init_records = 2;
  t.init_cost = 22;
  t.seed = 99;
  t.horizon = 4;
  t.config = {{"init_counts_toward_horizon", "false"}, {"init_counts_toward_cost", "true"}};
  t.refinements = 2;
  return t;
}

}  // namespace

TEST_CASE("modular point round trip") {
  Vector flat(5);
  flat << 1, 2, 3, 4, 5;
  const std::vector<int> split{2, 3};
  const ModularPoint p = ModularPoint::from_flat(flat, split);
  REQUIRE(p.num_modules() == 2);
  CHECK(p.blocks[1][0] == 3);
  CHECK(p.flatten() == flat);
  CHECK(p.dim() == 5);
}

TEST_CASE("movement cost") {
  const CostModel two{{40, 10}, 0.1};
  const ModularPoint a = point({{0.1}, {0.2}, {0.3}});
  CHECK(movement_cost(a, a, two) == 0.0);
  CHECK(movement_cost(point({{0.1}, {0.2}, {0.9}}), a, two) == 0.0);
  CHECK(movement_cost(point({{0.1}, {0.5}, {0.3}}), a, two) == 10.0);
  CHECK(movement_cost(point({{0.7}, {0.2}, {0.3}}), a, two) == 50.0);
  CHECK_THROWS_AS(movement_cost(point({{0.1}, {0.2}}), a, two), InvalidInput);

  // Changing a later module never costs more than an earlier one.
  CHECK(movement_cost(point({{0.1}, {0.5}, {0.3}}), a, two) <= movement_cost(point({{0.7}, {0.2}, {0.3}}), a, two));

  CHECK(first_changed_block(a, a) == std::nullopt);
  CHECK(first_changed_block(point({{0.1}, {0.5}, {0.9}}), a) == 1u);

  // Bitwise equality: -0.0 and 0.0 are different stored values.
  CHECK_FALSE(same_block(Vector::Constant(1, -0.0), Vector::Constant(1, 0.0)));
  CHECK(two.total() == 50.0);
  CHECK(two.min_positive() == 10.0);
}

TEST_CASE("split box") {
  const Box b = Box::uniform(5, -1.0, 2.0);
  const std::vector<int> split{2, 3};
  const auto parts = split_box(b, split);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].dim() == 2);
  CHECK(parts[1].dim() == 3);
  CHECK(parts[1].hi[2] == 2.0);
}

TEST_CASE("cumulative columns") {
  const RunTrace t = sample_trace();
  CHECK(t.records.back().cum_cost == 32.0);
  double s = 0.0, c = 0.0;
  for (const auto& r : t.records) s += r.simple_regret, c += r.gamma;
  CHECK(std::abs(t.records.back().cum_regret_plus - (s + 0.1 * c)) <= 1e-12);
  CHECK(check_trace_invariants(t).empty());
  CHECK(t.iterations() == 4);
  CHECK(t.at(2).simple_regret == 0.2);
  CHECK(t.at(-1).simple_regret == 0.8);

  RunTrace broken = t;
  broken.records[3].cum_cost += 1.0;
  CHECK_FALSE(check_trace_invariants(broken).empty());
}

TEST_CASE("incumbent regret") {
  const RunTrace t = sample_trace();
  CHECK(incumbent_regret(t, 0) == 0.5);
  CHECK(incumbent_regret(t, 1) == 0.5);
  CHECK(incumbent_regret(t, 4) == 0.1);

  CHECK(incumbent_regret_at_cost(t, 11.0) == 0.8);
  CHECK(incumbent_regret_at_cost(t, 22.0) == 0.5);
  CHECK(incumbent_regret_at_cost(t, 31.0) == 0.5);
  CHECK(incumbent_regret_at_cost(t, 32.0) == 0.1);
  CHECK(std::isinf(incumbent_regret_at_cost(t, 5.0)));
  // Excluding initialization, cost 10 already buys iteration 2.
  CHECK(incumbent_regret_at_cost(t, 0.0, false) == 0.5);
  CHECK(incumbent_regret_at_cost(t, 10.0, false) == 0.1);
}

TEST_CASE("module switches") {
  const RunTrace t = sample_trace();
  CHECK(module_switches(t, 0, 4) == 1);
  CHECK(module_switches(t, 1, 4) == 4);
  CHECK(module_switches(t, 0, 1) == 0);
}

TEST_CASE("csv round trip") {
  const RunTrace t = sample_trace();
  CHECK(trace_csv_header(2) ==
        "run_id,method,t,arm,h_t,x_1,x_2,y,f_true,gamma_t,cum_cost,simple_regret,cum_regret_plus");
  std::ostringstream os;
  write_trace_csv(os, t);
  const std::string text = os.str();
  CHECK(text.find('\r') == std::string::npos);
  std::istringstream is(text);
  const RunTrace back = read_trace_csv(is);
  REQUIRE(back.records.size() == t.records.size());
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    CHECK(back.records[i].t == t.records[i].t);
    CHECK(back.records[i].x == t.records[i].x);
    CHECK(back.records[i].cum_regret_plus == t.records[i].cum_regret_plus);
  }
  CHECK(back.method == "lambo");
  CHECK(back.run_id == 4);
  CHECK(back.seed == 99);
  CHECK(back.horizon == 4);
  CHECK(back.lambda == 0.1);
  CHECK(back.init_records == 2);
  CHECK(back.init_cost == 22.0);
  CHECK(back.refinements == 2);
  CHECK(back.config == t.config);
  CHECK(text.find("# init_counts_toward_horizon=false\n") != std::string::npos);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
