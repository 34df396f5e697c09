#pragma once

#include "lambo/box.hpp"
#include "lambo/modular.hpp"
#include "lambo/mset.hpp"
#include "lambo/rng.hpp"

#include <string>
#include <vector>

namespace lambo {

enum class FunctionId { Hartmann6, Ackley, Rastrigin, Griewank };

std::string to_string(FunctionId f);
FunctionId function_from_string(const std::string& s);

enum class Normalization { None, UnitInterval };

struct ObjectiveSpec {
  std::string name;
  FunctionId function = FunctionId::Hartmann6;
  int dimension = 0;
  Box domain;
  Vector optimizer;
  double f_min = 0.0;  // registered optimum f*
  double f_max = 0.0;  // registered maximum over the domain
  std::string max_note;
  Normalization normalization = Normalization::UnitInterval;
  double noise_std = 0.01;
  std::vector<int> split;
};

double hartmann6(const Vector& x);
double ackley(const Vector& x);
double rastrigin(const Vector& x);
double griewank(const Vector& x);

/// Raw function value; throws InvalidInput outside the domain.
double evaluate_raw(const ObjectiveSpec& spec, const Vector& x);

/// Affine map of a raw value onto [0, 1] using the registered min and max.
/// A degenerate range returns 0.5.
double normalize(const ObjectiveSpec& spec, double raw);

/// Noise-free objective as seen by an optimizer (normalized when enabled).
double true_value(const ObjectiveSpec& spec, const Vector& x);

/// true_value plus N(0, noise_std^2) noise drawn from `rng`.
double evaluate(const ObjectiveSpec& spec, const Vector& x, Rng& rng);
double evaluate(const ObjectiveSpec& spec, const ModularPoint& x, Rng& rng);

/// Optimum as seen by an optimizer (0 under unit-interval normalization).
double registered_optimum(const ObjectiveSpec& spec);

/// Base objective definition with its registered optimum and maximum.
ObjectiveSpec base_objective(FunctionId f);

struct Preset {
  std::string name;
  ObjectiveSpec objective;
  std::vector<double> module_costs;  // one per module; the last is the negligible free module
  double lambda = 0.1;

  CostModel cost_model() const;
  std::vector<Box> module_boxes() const;
};

const std::vector<Preset>& preset_table();
std::vector<std::string> preset_names();

/// Throws InvalidInput listing all available presets when the name is unknown.
const Preset& preset(const std::string& name);

/// Bisect each partitioned module (all but the last) once along a coordinate
/// drawn uniformly from `rng`.
std::vector<Partition> seed_partitions(const Preset& p, Rng& rng);

}  // namespace lambo
