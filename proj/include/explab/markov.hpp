#pragma once

#include <optional>
#include <string>

#include "explab/measure_space.hpp"

namespace explab {

// Row-stochastic kernel on a finite measure space, optionally tagged with a
// reversing measure m. Construction checks nonnegativity and row sums; when m
// is present it also checks detailed balance m(x)P(x,y) = m(y)P(y,x).
class MarkovKernel {
 public:
  MarkovKernel(FiniteMeasureSpace space, Mat transition,
               std::optional<Vec> reversing_measure = std::nullopt,
               const Tolerances& tol = default_tolerances());

  const FiniteMeasureSpace& space() const { return space_; }
  const Mat& transition() const { return P_; }
  int size() const { return space_.size(); }
  const std::optional<Vec>& reversing_measure() const { return m_; }

  // The measure reversible ops run against: the tagged one, else the space
  // weights if those happen to satisfy detailed balance. Errors otherwise.
  const Vec& reversing_or_fail(const Tolerances& tol = default_tolerances()) const;

 private:
  FiniteMeasureSpace space_;
  Mat P_;
  std::optional<Vec> m_;
};

// max |m(x)P(x,y) - m(y)P(y,x)| together with the attaining pair.
struct BalanceResidual {
  double value = 0.0;
  int x = 0, y = 0;
};
BalanceResidual detailed_balance_residual(const Mat& P, const Vec& m);
void require_reversible(const MarkovKernel& k, const Vec& m, double tol);

// (P f)(x) = sum_y P(x,y) f(y).
Vec markov_apply(const MarkovKernel& k, const Vec& f);
CVec markov_apply(const MarkovKernel& k, const CVec& f);

// Dual action on measures: (mu P)(y) = sum_x mu(x) P(x,y). Preserves total
// mass; maps the reversing measure to itself.
Vec dual_apply(const MarkovKernel& k, const Vec& mu);

// Symmetric edge measure mu(x,y) = m(x)P(x,y); requires reversibility.
Mat edge_measure(const MarkovKernel& k, const Vec& m, const Tolerances& tol = default_tolerances());

// |d A|_m = sum_{x in A} m(x) P(x, X \ A). Equal for A and its complement.
double boundary_size(const MarkovKernel& k, const Vec& m, const AtomSet& a,
                     const Tolerances& tol = default_tolerances());

// eps_p(f) = 1/2 sum_{x,y} |f(x)-f(y)|^p mu(x,y), p >= 1.
double dirichlet_energy(const MarkovKernel& k, const Vec& m, const CVec& f, double p,
                        const Tolerances& tol = default_tolerances());
double dirichlet_energy(const MarkovKernel& k, const Vec& m, const Vec& f, double p,
                        const Tolerances& tol = default_tolerances());

struct SpectralReport {
  Vec eigenvalues;          // descending; spectrum of the symmetrized kernel
  double lambda2 = 0.0;     // largest eigenvalue orthogonal to sqrt(m)
  double spectral_gap = 0;  // 1 - lambda2
  int one_eigenspace_dim = 1;
  bool has_gap = false;     // lambda2 < 1 - tol.eigen
};

// Full symmetric eigendecomposition of M(x,y) = P(x,y) sqrt(m(x)/m(y)).
// Eigenvalue-1 multiplicity > 1 (disconnected kernel) reports lambda2 = 1 and
// gap 0 rather than failing. A single atom reports lambda2 = 0.
SpectralReport spectrum(const MarkovKernel& k, const Vec& m,
                        const Tolerances& tol = default_tolerances());

// Symmetrized matrix in the sqrt(m) frame; exposed for operator work.
Mat symmetrized(const MarkovKernel& k, const Vec& m, const Tolerances& tol = default_tolerances());

}  // namespace explab
