#pragma once

#include "explab/markov.hpp"

namespace explab {

struct CheegerResult {
  double kappa = 0.0;
  AtomSet argmin;
};

// Exact Cheeger constant: min over 0 < m(A) <= m(X)/2 of |dA|_m / m(A), by
// complement-paired scan over all proper nonempty subsets. Ties within 1e-12
// relative go to the lexicographically smallest index set. Spaces larger than
// `cap` atoms raise cap_exceeded.
CheegerResult cheeger_exact(const MarkovKernel& k, const Vec& m, int cap = kEnumerationCap,
                            const Tolerances& tol = default_tolerances());

// Spectral sweep upper bound: sort atoms by the second eigenvector of the
// symmetrized kernel over sqrt(m), scan prefix cuts. Always >= the exact
// constant; cheap at any size.
CheegerResult cheeger_sweep(const MarkovKernel& k, const Vec& m,
                            const Tolerances& tol = default_tolerances());

struct SandwichReport {
  double kappa = 0.0;
  double kappa_upper = 0.0;  // sweep value
  double lambda2 = 0.0;
  double spectral_gap = 0.0;
  double lower = 0.0;  // kappa^2 / 2
  double upper = 0.0;  // 2 kappa
  bool holds = false;  // lower - slack <= gap <= upper + slack
  AtomSet argmin;
};

// kappa^2/2 <= 1 - lambda2 <= 2 kappa with slack tol.eigen.
SandwichReport cheeger_sandwich(const MarkovKernel& k, const Vec& m, int cap = kEnumerationCap,
                                const Tolerances& tol = default_tolerances());

}  // namespace explab
