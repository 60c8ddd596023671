#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "explab/expansion.hpp"
#include "explab/warped.hpp"

namespace explab {

// Operator on L2(X, nu) stored in the orthonormal frame e_x = delta_x /
// sqrt(nu(x)). The frame is orthonormal, so the operator norm is the largest
// singular value of the matrix and compressions chi_A T chi_C are plain
// submatrices.
struct WeightedOperator {
  FiniteMeasureSpace space;
  Mat a;
};

// Frame form of a kernel acting on functions, (Tf)(x) = sum_y K(x,y) f(y).
WeightedOperator from_function_kernel(const FiniteMeasureSpace& space, const Mat& k);
WeightedOperator identity_operator(const FiniteMeasureSpace& space);
// Half-density action of one generator: permutes frame vectors, e_x -> e_{s.x}.
WeightedOperator generator_operator(const FiniteAction& action, int s);
WeightedOperator compose(const WeightedOperator& a, const WeightedOperator& b);
double operator_norm(const Mat& a);
double operator_norm(const WeightedOperator& t);

// Rank-one orthogonal projection onto a unit frame vector.
struct RankOneProjection {
  FiniteMeasureSpace space;
  Vec xi;

  Mat matrix() const { return xi * xi.transpose(); }
  WeightedOperator as_operator() const { return {space, matrix()}; }
};

// Projection onto the constants over Y: xi = sqrt(nu) / sqrt(nu(Y)) on Y.
RankOneProjection averaging_projection(const FiniteMeasureSpace& space, const AtomSet& y);

// ||chi_A T chi_C||: largest singular value of the (A, C) submatrix. Empty A
// or C gives 0. Monotone in both arguments.
double cut_norm(const Mat& a, const AtomSet& rows, const AtomSet& cols);
double cut_norm(const WeightedOperator& t, const AtomSet& rows, const AtomSet& cols);
// Rank-one form: ||chi_A xi|| ||chi_C xi||.
double cut_norm(const RankOneProjection& p, const AtomSet& rows, const AtomSet& cols);

// Largest orbit distance between coordinates coupled by an entry above
// entry_tol; nullopt when some such entry joins distinct orbits.
std::optional<int> rho_propagation(const WeightedOperator& t, const FiniteAction& action,
                                   double entry_tol = 1e-12);

// Hard truncation: zeroes entries at orbit distance > k (cross-orbit entries
// always); the result has rho-propagation <= k by construction.
WeightedOperator truncate_to_propagation(const WeightedOperator& t, const FiniteAction& action, int k);

struct QuasiLocalityProfile {
  std::vector<double> radii;
  std::vector<double> eps;       // sup (exact) or best found (sampled) cut norm
  std::vector<std::pair<AtomSet, AtomSet>> witnesses;
  bool exact = true;             // false: seeded sampling, eps is a lower bound
};

// eps(k) = sup over pairs (A, C) with (B_k . A) disjoint from C of
// ||chi_A T chi_C||. Cut norms are monotone in C, so C = X minus B_k . A is
// optimal for every T and exact mode enumerates A alone. Spaces above
// exact_cap atoms fall back to `samples` seeded draws of A and report a lower
// bound; either way eps equals the cut norm of the stored witness pair.
QuasiLocalityProfile rho_quasi_locality_profile(const WeightedOperator& t, const FiniteAction& action,
                                                const std::vector<int>& ks, int exact_cap = 20,
                                                std::uint64_t seed = 1, int samples = 10000);

// eps_t(R) = sup over pairs at warped distance strictly greater than R.
QuasiLocalityProfile warped_quasi_locality_profile(const WeightedOperator& t, const FiniteMetric& warped,
                                                   const std::vector<double>& rs, int exact_cap = 20,
                                                   std::uint64_t seed = 1, int samples = 10000);

// Projection onto the sigma-weighted constants: xi = sqrt(sigma nu) on Y,
// normalized. The norm limit of the conjugated Markov powers below.
RankOneProjection hat_embedding_projection(const ActionKernel& ak);

struct PowerReport {
  bool has_gap = false;      // lambda_hat < 1 - tol.eigen
  double lambda_hat = 1.0;   // largest modulus below the top eigenvalue
  int max_length = 0;        // largest generator length in S
  std::vector<double> norms;        // ||P^n - P_inf||, n = 1..n_max
  std::vector<double> bounds;       // lambda_hat^n
  std::vector<int> propagation;     // rho-propagation of P^n (-1: infinite)
  bool norms_bounded = false;       // norms <= bounds + tol.identity
  bool propagation_bounded = false; // propagation <= n * max_length
};

// Conjugated Markov powers against their limit projection. The isometric
// embedding of L2(Y, tilde_nu) is the identity on frame coordinates, so the
// extended power is the padded symmetrized local kernel power.
PowerReport markov_power_report(const ActionKernel& ak, int n_max = 50,
                                const Tolerances& tol = default_tolerances());

struct AdReport {
  double scale = 0.0;               // nu(Y) / tilde_nu(Y)
  WeightedOperator ad;              // zero-extension conjugate of the Y-averaging projection
  double identity_deviation = 0.0;  // || ad - scale * P_Y ||
  bool has_gap = false;
  std::vector<double> power_norms;  // || Ad(Markov^n) - ad ||, n = 1..n_max
};

// Non-isometric zero-extension embedding: frame matrix diag(1 / sqrt(sigma))
// padded by zero. Conjugating the local averaging projection lands exactly on
// scale * P_Y; conjugated Markov powers converge to it when the gap is there.
AdReport ad_embedding_report(const ActionKernel& ak, int n_max = 20,
                             const Tolerances& tol = default_tolerances());

struct GhostLevel {
  double t = 1.0;
  double g = 0.0;  // max over centers of ||chi_B xi|| on open R-balls
  int argmax = 0;
};

// Per-level ghost statistic of one projection over slices of a fixed cone.
std::vector<GhostLevel> ghost_profile(const RankOneProjection& p, WarpedCone& cone,
                                      const std::vector<double>& ts, double radius);

// One level of a refining family: its own space, action, and scale.
struct RefiningLevel {
  FiniteAction action;
  FiniteMetric base;
  double t = 1.0;
};

// Ghost statistic of the per-level full-space averaging projection, with the
// level measure normalized to mass one: g = sqrt(max_x nu(open ball)).
std::vector<GhostLevel> ghost_profile_refining(const std::vector<RefiningLevel>& levels, double radius);

struct PropagationWitness {
  int k = 0;
  int power_n = 0;          // floor(k / max generator length)
  double power_bound = 0;   // ||P^n - P_inf|| at that n
  double truncation_bound = 0;  // ||P_inf - trunc_k(P_inf)||
};

// Two certified upper bounds on the distance from the limit projection to
// operators of rho-propagation <= k: the Markov power at the largest
// admissible exponent, and the hard truncation of the projection itself.
PropagationWitness finite_propagation_witness(const ActionKernel& ak, int k,
                                              const Tolerances& tol = default_tolerances());

struct PoincareLevel {
  double t = 1.0;
  double lambda2 = 0.0;
  double kappa = 0.0;       // 1 / (2 (1 - lambda2))
  double theta = 1.0;
  double lhs = 0.0;         // squared nu|_Y norm of the centered embedding
  double rhs = 0.0;         // kappa sqrt(theta) times the generator displacement energy
  bool holds = true;
  double max_warped_distance = 0.0;  // over pairs of atoms at this level
  double image_spread = 0.0;         // max pairwise embedding distance over Y
  double spread_bound = 0.0;         // 2 sqrt(lhs / min nu on Y), certified cap on the spread
};

struct PoincareReport {
  std::vector<PoincareLevel> levels;
  bool all_hold = true;
};

// Per level t: centers each embedding coordinate over (Y, nu|_Y), checks the
// spectral Poincare inequality lhs <= rhs, and compares the certified bound
// on the embedded spread against the warped diameter. For an expanding family
// the ratio spread_bound / max_warped_distance shrinks along levels: the
// numerical form of the coarse-embedding obstruction.
PoincareReport poincare_obstruction_witness(const ActionKernel& ak, const FiniteMetric& base,
                                            const std::vector<double>& ts, const std::vector<Mat>& embeddings,
                                            const Tolerances& tol = default_tolerances());

}  // namespace explab
