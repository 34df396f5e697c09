#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lambo {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Derive a stream seed from a master seed and a path of integer labels.
/// The derivation folds each label through splitmix64, so appending a new
/// label (a new method, a new run) never perturbs previously derived seeds.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Uniform double in [0, 1). Implemented on raw engine output so that the
/// sequence is identical across standard library implementations.
double uniform01(Rng& rng);

/// Standard normal via Box-Muller on uniform01.
double standard_normal(Rng& rng);

/// Uniform integer in [0, n).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace lambo
