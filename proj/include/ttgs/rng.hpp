#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "ttgs/types.hpp"

namespace ttgs {

// All randomness in the library flows through mt19937_64 plus the helpers
// below. The standard distributions are deliberately avoided: their mapping
// from raw bits to values is implementation-defined, and we want identical
// streams on every platform.
using Rng = std::mt19937_64;

// splitmix64 step; used to derive well-separated seeds from small integers.
std::uint64_t splitmix64(std::uint64_t x);

// Folds a list of integers (master seed, task index, ...) into one seed.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

// Uniform integer in [0, n), n > 0, via rejection sampling (no modulo bias).
std::uint64_t bounded(Rng& rng, std::uint64_t n);

// Uniform double in [0, 1) with 53 random bits.
Scalar uniform_unit(Rng& rng);

// Uniform double in [lo, hi).
Scalar uniform_range(Rng& rng, Scalar lo, Scalar hi);

}  // namespace ttgs
