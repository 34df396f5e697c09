#include "lambo/trace.hpp"

#include "lambo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace lambo {

const TraceRecord& RunTrace::at(long t) const {
  const long idx = t + init_records - 1;
  if (idx < 0 || idx >= static_cast<long>(records.size()))
    throw InvalidInput("trace has no record for t = " + std::to_string(t));
  return records[static_cast<std::size_t>(idx)];
}

void push_record(RunTrace& trace, TraceRecord rec) {
  const double prev_cost = trace.records.empty() ? 0.0 : trace.records.back().cum_cost;
  const double prev_rplus = trace.records.empty() ? 0.0 : trace.records.back().cum_regret_plus;
  rec.cum_cost = prev_cost + rec.gamma;
  rec.cum_regret_plus = prev_rplus + rec.simple_regret + trace.lambda * rec.gamma;
  trace.records.push_back(std::move(rec));
}

double incumbent_regret(const RunTrace& trace, long t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    if (r.t > t) break;
    best = std::min(best, r.simple_regret);
  }
  return best;
}

double incumbent_regret_at_cost(const RunTrace& trace, double budget, bool with_init) {
  const double offset = with_init ? 0.0 : trace.init_cost;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    if (r.cum_cost - offset > budget) break;
    best = std::min(best, r.simple_regret);
  }
  return best;
}

long module_switches(const RunTrace& trace, int module, long t) {
  long n = 0;
  for (const auto& r : trace.records) {
    if (r.t <= 0) continue;
    if (r.t > t) break;
    if (r.changed_module >= 0 && r.changed_module <= module) ++n;
  }
  return n;
}

std::string check_trace_invariants(const RunTrace& trace) {
  double cost = 0.0, rplus = 0.0, regret_sum = 0.0;
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    if (!(r.gamma >= 0.0)) return "negative movement cost at t = " + std::to_string(r.t);
    cost += r.gamma;
    rplus = rplus + r.simple_regret + trace.lambda * r.gamma;
    regret_sum += r.simple_regret;
    if (r.cum_cost != cost) return "cumulative cost recurrence broken at t = " + std::to_string(r.t);
    if (r.cum_regret_plus != rplus) return "cumulative R+ recurrence broken at t = " + std::to_string(r.t);
    const double decomposed = regret_sum + trace.lambda * cost;
    if (std::abs(decomposed - r.cum_regret_plus) > 1e-12 * std::max(1.0, std::abs(r.cum_regret_plus)))
      return "R+ decomposition off at t = " + std::to_string(r.t);
    if (k > 0 && r.cum_cost < trace.records[k - 1].cum_cost)
      return "cumulative cost decreased at t = " + std::to_string(r.t);
  }
  return {};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_csv_header(int dim) {
  std::string h = "run_id,method,t,arm,h_t";
  for (int i = 1; i <= dim; ++i) h += ",x_" + std::to_string(i);
  h += ",y,f_true,gamma_t,cum_cost,simple_regret,cum_regret_plus";
  return h;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  const int dim = trace.records.empty() ? 0 : static_cast<int>(trace.records.front().x.size());
  os << "# seed=" << trace.seed << '\n'
     << "# horizon=" << trace.horizon << '\n'
     << "# lambda=" << format_double(trace.lambda) << '\n'
     << "# f_star=" << format_double(trace.f_star) << '\n'
     << "# f_star_registered=" << (trace.f_star_registered ? "true" : "false") << '\n';
  for (const auto& [k, v] : trace.config) os << "# " << k << '=' << v << '\n';
  os << "# zero_mass_fallbacks=" << trace.zero_mass_fallbacks << '\n'
     << "# unguarded_updates=" << trace.unguarded_updates << '\n'
     << "# depth_increments=" << trace.depth_increments << '\n'
     << "# refinements=" << trace.refinements << '\n'
     << "# discarded_arms=" << trace.discarded_arms << '\n'
     << "# final_arms=" << trace.final_arms << '\n';
  if (!trace.error.empty()) os << "# error=" << trace.error << '\n';
  os << trace_csv_header(dim) << '\n';
  for (const auto& r : trace.records) {
    os << trace.run_id << ',' << trace.method << ',' << r.t << ',' << r.arm << ',' << r.level;
    for (Eigen::Index i = 0; i < r.x.size(); ++i) os << ',' << format_double(r.x[i]);
    os << ',' << format_double(r.y) << ',' << format_double(r.f_true) << ',' << format_double(r.gamma) << ','
       << format_double(r.cum_cost) << ',' << format_double(r.simple_regret) << ','
       << format_double(r.cum_regret_plus) << '\n';
  }
}

RunTrace read_trace_csv(std::istream& is) {
  std::string line;
  RunTrace trace;
  // Leading "# key=value" lines carry run metadata.
  while (std::getline(is, line) && line.rfind('#', 0) == 0) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(2, eq - 2), value = line.substr(eq + 1);
    try {
      if (key == "seed") trace.seed = std::stoull(value);
      else if (key == "horizon") trace.horizon = std::stol(value);
      else if (key == "lambda") trace.lambda = std::stod(value);
      else if (key == "f_star") trace.f_star = std::stod(value);
      else if (key == "f_star_registered") trace.f_star_registered = value == "true";
      else if (key == "zero_mass_fallbacks") trace.zero_mass_fallbacks = std::stol(value);
      else if (key == "unguarded_updates") trace.unguarded_updates = std::stol(value);
      else if (key == "depth_increments") trace.depth_increments = std::stol(value);
      else if (key == "refinements") trace.refinements = std::stol(value);
      else if (key == "discarded_arms") trace.discarded_arms = std::stol(value);
      else if (key == "final_arms") trace.final_arms = std::stol(value);
      else if (key == "error") trace.error = value;
      else trace.config.emplace_back(key, value);
    } catch (const std::logic_error&) {
      throw InvalidInput("trace CSV metadata '" + key + "' is malformed");
    }
  }
  if (is.fail() && line.empty()) throw InvalidInput("trace CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 11 || header[0] != "run_id") throw InvalidInput("not a trace CSV");
  const int dim = static_cast<int>(header.size()) - 11;
  if (line != trace_csv_header(dim)) throw InvalidInput("unexpected trace CSV header");
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != header.size()) throw InvalidInput("trace CSV row " + std::to_string(row) + " has wrong width");
    try {
      TraceRecord r;
      trace.run_id = std::stol(f[0]);
      trace.method = f[1];
      r.t = std::stol(f[2]);
      r.arm = std::stol(f[3]);
      r.level = std::stoi(f[4]);
      r.x.resize(dim);
      for (int i = 0; i < dim; ++i) r.x[i] = std::stod(f[5 + static_cast<std::size_t>(i)]);
      const std::size_t o = 5 + static_cast<std::size_t>(dim);
      r.y = std::stod(f[o]);
      r.f_true = std::stod(f[o + 1]);
      r.gamma = std::stod(f[o + 2]);
      r.cum_cost = std::stod(f[o + 3]);
      r.simple_regret = std::stod(f[o + 4]);
      r.cum_regret_plus = std::stod(f[o + 5]);
      if (r.t <= 0) {
        ++trace.init_records;
        trace.init_cost = r.cum_cost;
      }
      trace.records.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw InvalidInput("trace CSV row " + std::to_string(row) + " is malformed");
    }
  }
  return trace;
}

}  // namespace lambo
