#pragma once

#include <random>

#include "explab/action.hpp"
#include "explab/markov.hpp"

namespace explab {

// Deterministic across platforms: mt19937_64 output mapped to doubles by
// fixed arithmetic, never through std distributions.
double uniform01(std::mt19937_64& rng);                  // in [0, 1)
double uniform_in(double lo, double hi, std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);            // Box-Muller, fresh pair per call

// Reversible by construction: symmetric positive edge weights, reversing
// measure = row sums, transition = row-normalized edges.
MarkovKernel random_reversible_kernel(int n, std::mt19937_64& rng);

// Strictly positive random weights, `pairs` random permutations with their
// inverses, and the identity; every generator has length 1.
FiniteAction random_weighted_action(int n, int pairs, std::mt19937_64& rng);

AtomSet random_nonempty_subset(int n, std::mt19937_64& rng);

Vec random_vector(int n, std::mt19937_64& rng);  // standard normal entries

}  // namespace explab
