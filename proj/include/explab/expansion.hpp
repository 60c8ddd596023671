#pragma once

#include "explab/action.hpp"
#include "explab/cheeger.hpp"
#include "explab/markov.hpp"

namespace explab {

// Normalized local kernel of (Y, S): sigma(x) = sum over s in S with s.x in Y
// of r(s,x)^(1/2); Pi(x, s.x) += r(s,x)^(1/2) / sigma(x); reversing measure
// tilde_nu = sigma nu on Y. S must contain the identity symbol, which keeps
// sigma >= 1 and nu <= tilde_nu pointwise.
struct ActionKernel {
  FiniteAction action;
  AtomSet Y;               // global atom indices, increasing
  std::vector<int> S;      // generator indices, closed under inverse, with identity
  std::vector<int> local;  // global -> local index in Y, -1 outside
  Vec sigma;               // on Y
  Vec tilde_nu;            // on Y
  MarkovKernel kernel;     // on (Y, nu|_Y), reversing measure tilde_nu

  const Vec& nu_local() const { return kernel.space().weights(); }
  int y_size() const { return static_cast<int>(Y.size()); }
};

ActionKernel build_action_kernel(const FiniteAction& action, AtomSet Y, std::vector<int> S,
                                 const Tolerances& tol = default_tolerances());
// Y = whole space, S = every declared symbol.
ActionKernel build_action_kernel(const FiniteAction& action, const Tolerances& tol = default_tolerances());

struct VertexExpansion {
  double c = 0.0;     // min over admissible A of nu((S.A) cap Y)/nu(A) - 1
  AtomSet argmin;     // global indices
};

// Exact scan over subsets A of Y with 0 < nu(A) <= nu(Y)/2; ties go to the
// lexicographically smallest subset.
VertexExpansion vertex_expansion_constant(const FiniteAction& action, const AtomSet& Y, const std::vector<int>& S,
                                          int cap = kEnumerationCap);

// Cheeger constant of the normalized local kernel under tilde_nu.
CheegerResult markov_expansion_constant(const ActionKernel& ak, int cap = kEnumerationCap,
                                        const Tolerances& tol = default_tolerances());

struct EdgeVertexComparison {
  double theta = 1.0;
  bool bounds_hold = true;
  double worst_lower = 0.0;  // max of (|dA|/sqrt(T) - sum_s nu((sA\A) cap Y)) over A
  double worst_upper = 0.0;  // max of (sum_s nu((sA\A) cap Y) - sqrt(T) |dA|) over A
  double worst_measure = 0.0;  // violation of nu(A) <= tilde_nu(A) <= |S| sqrt(T) nu(A)
};

// Checks, for every nonempty A subseteq Y, the two-sided comparison between
// the kernel boundary and the generator-wise vertex boundary, and the measure
// comparison nu <= tilde_nu <= |S| sqrt(Theta) nu.
EdgeVertexComparison edge_vertex_comparison(const ActionKernel& ak, int cap = kEnumerationCap,
                                            const Tolerances& tol = default_tolerances());

struct ProfileEntry {
  double alpha = 0.0;   // or beta for the upper range
  bool vacuous = false; // no subset mass in the scanned window
  bool expanding = false;
  int k = 0;            // least radius with min ratio > 1, when expanding
  double c = 0.0;       // that min ratio - 1
  AtomSet witness;      // argmin subset at radius k (global indices)
};

struct ExpansionProfile {
  std::vector<ProfileEntry> lower;  // alpha nu(Y) <= nu(A) <= nu(Y)/2
  std::vector<ProfileEntry> upper;  // nu(Y)/2 <= nu(A) <= beta nu(Y)
  int k_max = 0;
};

ExpansionProfile asymptotic_profile(const FiniteAction& action, const AtomSet& Y,
                                    const std::vector<double>& alphas = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5},
                                    int k_max = 6,
                                    const std::vector<double>& betas = {0.5, 0.6, 0.7, 0.8, 0.9},
                                    int cap = kEnumerationCap);

struct LocalGapReport {
  double lambda_q = 0.0;        // min of the reduced quadratic form; +inf when |Y| = 1
  bool has_gap = false;         // lambda_q > 1e-12
  double kappa_lo = 0.0;        // 1 / sqrt(|S| lambda_q)
  double kappa_hi = 0.0;        // 1 / sqrt(lambda_q); +inf when lambda_q = 0
  double lambda2 = 0.0;         // of the normalized local kernel
  double kappa_from_markov = 0; // 1 / sqrt(2 (1 - lambda2)); +inf without gap
  int coupling_components = 1;  // parts of Y under the S-move graph
};

// Smallest value of sum_s ||s.f - f||^2_{nu|Y} over f with integral_Y f dnu = 0
// and ||f||_{nu|Y} = 1; coordinates outside Y are eliminated exactly.
LocalGapReport local_spectral_gap(const FiniteAction& action, const AtomSet& Y, const std::vector<int>& S,
                                  const Tolerances& tol = default_tolerances());

}  // namespace explab
