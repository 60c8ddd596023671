#pragma once

#include <map>
#include <vector>

#include "explab/action.hpp"

namespace explab {

// Symmetric matrix of pairwise distances. Construction symmetrizes within
// tol.metric, zeroes the diagonal, and checks positivity off the diagonal and
// the triangle inequality. Distinct atoms at distance zero are rejected so
// that scaling arguments have a least positive distance to lean on.
class FiniteMetric {
 public:
  explicit FiniteMetric(Mat d, const Tolerances& tol = default_tolerances());

  // Skips the axiom checks; for matrices that satisfy them by construction.
  static FiniteMetric unchecked(Mat d);

  int size() const { return static_cast<int>(d_.rows()); }
  double operator()(int x, int y) const { return d_(x, y); }
  const Mat& matrix() const { return d_; }
  double diameter() const;
  double min_positive() const;  // least off-diagonal distance

 private:
  FiniteMetric() = default;
  Mat d_;
};

// Scales so the largest distance equals target. Zero diameter is an error.
Mat normalize_diameter(Mat d, double target = 2.0);

// Path metric of the complete graph whose chord (x,y) costs t d(x,y) and
// which gains an edge of length len(s) from x to s.x for every generator.
// Requires t >= 1 so a generator jump never beats the chord it replaces at
// scale one. Shortest paths by Floyd-Warshall over SIMD min-plus rows; the
// update order keeps exact symmetry.
FiniteMetric warp(const FiniteMetric& base, const FiniteAction& action, double t);

// Closed ball {y : d(center, y) <= radius}.
AtomSet warped_ball(const FiniteMetric& d, int center, double radius);

// Open ball {y : d(center, y) < radius}; ghost statistics use this so the
// value drops strictly when a radius crosses a word-distance shell.
AtomSet open_warped_ball(const FiniteMetric& d, int center, double radius);

// Closed neighborhood {y : d(y, A) <= radius}.
AtomSet metric_neighborhood(const FiniteMetric& d, const AtomSet& a, double radius);

struct ConePoint {
  int x = 0;
  double t = 1.0;
};

// Family of warped copies of one base space, indexed by the scale t >= 1.
// Base diameter must not exceed 2 so levels shrink relative to the scale.
class WarpedCone {
 public:
  WarpedCone(FiniteMetric base, FiniteAction action, const Tolerances& tol = default_tolerances());

  const FiniteMetric& slice(double t);  // memoized warp at scale t
  // d((x,t),(y,t')) = warped distance at scale min(t,t') plus |t - t'|.
  double distance(ConePoint p, ConePoint q);

  const FiniteMetric& base() const { return base_; }
  const FiniteAction& action() const { return action_; }

 private:
  FiniteMetric base_;
  FiniteAction action_;
  std::map<double, FiniteMetric> slices_;
};

struct StabilizationReport {
  AtomSet target;                     // word-ball image of A at radius floor(R)
  std::vector<double> ts;             // scanned scales, ascending
  std::vector<AtomSet> neighborhoods; // closed R-neighborhoods of A per scale
  bool stabilizes = false;            // a suffix of the scan equals the target
  double first_stable = 0.0;          // least scanned t of that suffix
  double predicted_threshold = 0.0;   // R / min positive base distance
};

// Tracks the closed R-neighborhood of A in the warped metric as t grows. Once
// t exceeds R over the least positive base distance, every chord step costs
// more than R and only generator jumps remain, so the neighborhood freezes at
// the word-ball image of A of radius floor(R).
StabilizationReport neighborhood_stabilization(const FiniteMetric& base, const FiniteAction& action,
                                               const AtomSet& a, double radius, std::vector<double> ts);

}  // namespace explab
