#include "explab/warped.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "explab/simd.hpp"

namespace explab {

FiniteMetric::FiniteMetric(Mat d, const Tolerances& tol) {
  const int n = static_cast<int>(d.rows());
  if (n < 1 || d.cols() != n) fail(ErrorCode::invalid_argument, "metric: matrix must be square and nonempty");
  for (int x = 0; x < n; ++x) {
    if (std::abs(d(x, x)) > tol.metric)
      fail(ErrorCode::invalid_argument, "metric: nonzero self-distance at atom " + std::to_string(x));
    d(x, x) = 0.0;
  }
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      if (std::abs(d(x, y) - d(y, x)) > tol.metric)
        fail(ErrorCode::invalid_argument,
             "metric: asymmetric pair (" + std::to_string(x) + ", " + std::to_string(y) + ")");
      double v = 0.5 * (d(x, y) + d(y, x));
      if (v <= 0.0)
        fail(ErrorCode::invalid_argument,
             "metric: distinct atoms (" + std::to_string(x) + ", " + std::to_string(y) + ") at distance zero");
      d(x, y) = d(y, x) = v;
    }
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (d(x, y) > d(x, k) + d(k, y) + tol.metric)
          fail(ErrorCode::invalid_argument, "metric: triangle inequality fails at (" + std::to_string(x) + ", " +
                                                std::to_string(k) + ", " + std::to_string(y) + ")");
  d_ = std::move(d);
}

FiniteMetric FiniteMetric::unchecked(Mat d) {
  FiniteMetric m;
  m.d_ = std::move(d);
  return m;
}

double FiniteMetric::diameter() const { return d_.maxCoeff(); }

double FiniteMetric::min_positive() const {
  const int n = size();
  if (n < 2) fail(ErrorCode::invalid_argument, "metric: no positive distances on a single atom");
  double least = std::numeric_limits<double>::infinity();
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) least = std::min(least, d_(x, y));
  return least;
}

Mat normalize_diameter(Mat d, double target) {
  if (target <= 0.0) fail(ErrorCode::invalid_argument, "normalize_diameter: target must be positive");
  double diam = d.maxCoeff();
  if (diam <= 0.0) fail(ErrorCode::invalid_argument, "normalize_diameter: zero diameter");
  return d * (target / diam);
}

FiniteMetric warp(const FiniteMetric& base, const FiniteAction& action, double t) {
  const int n = base.size();
  if (action.size() != n) fail(ErrorCode::invalid_argument, "warp: action and metric disagree on the atom count");
  if (t < 1.0) fail(ErrorCode::invalid_argument, "warp: scale must be at least 1");

  Mat w = t * base.matrix();
  const auto& gens = action.gens();
  for (int s = 0; s < gens.count(); ++s) {
    if (gens.length(s) == 0) continue;
    double len = static_cast<double>(gens.length(s));
    for (int x = 0; x < n; ++x) {
      int y = action.apply(s, x);
      if (y != x && len < w(x, y)) w(x, y) = len;
    }
  }
  // Generator edges land symmetrically: the inverse symbol has equal length.

  const auto& ops = simd::ops();
  for (int k = 0; k < n; ++k) {
    const double* row_k = w.data() + static_cast<std::ptrdiff_t>(k) * n;
    for (int i = 0; i < n; ++i)
      ops.min_plus(w.data() + static_cast<std::ptrdiff_t>(i) * n, row_k, w(i, k), n);
  }
  for (int x = 0; x < n; ++x) w(x, x) = 0.0;
  return FiniteMetric::unchecked(std::move(w));
}

AtomSet warped_ball(const FiniteMetric& d, int center, double radius) {
  if (center < 0 || center >= d.size()) fail(ErrorCode::invalid_argument, "warped_ball: center out of range");
  AtomSet out;
  for (int y = 0; y < d.size(); ++y)
    if (d(center, y) <= radius) out.push_back(y);
  return out;
}

AtomSet open_warped_ball(const FiniteMetric& d, int center, double radius) {
  if (center < 0 || center >= d.size()) fail(ErrorCode::invalid_argument, "open_warped_ball: center out of range");
  AtomSet out;
  for (int y = 0; y < d.size(); ++y)
    if (d(center, y) < radius) out.push_back(y);
  return out;
}

AtomSet metric_neighborhood(const FiniteMetric& d, const AtomSet& a, double radius) {
  if (a.empty()) fail(ErrorCode::invalid_argument, "metric_neighborhood: empty set");
  int prev = -1;
  for (int x : a) {
    if (x <= prev || x >= d.size()) fail(ErrorCode::invalid_argument, "metric_neighborhood: bad atom set");
    prev = x;
  }
  AtomSet out;
  for (int y = 0; y < d.size(); ++y) {
    double best = std::numeric_limits<double>::infinity();
    for (int x : a) best = std::min(best, d(x, y));
    if (best <= radius) out.push_back(y);
  }
  return out;
}

WarpedCone::WarpedCone(FiniteMetric base, FiniteAction action, const Tolerances& tol)
    : base_(std::move(base)), action_(std::move(action)) {
  if (action_.size() != base_.size())
    fail(ErrorCode::invalid_argument, "cone: action and metric disagree on the atom count");
  if (base_.diameter() > 2.0 + tol.metric)
    fail(ErrorCode::invalid_argument, "cone: base diameter exceeds 2; normalize it first");
}

const FiniteMetric& WarpedCone::slice(double t) {
  auto it = slices_.find(t);
  if (it == slices_.end()) it = slices_.emplace(t, warp(base_, action_, t)).first;
  return it->second;
}

double WarpedCone::distance(ConePoint p, ConePoint q) {
  const FiniteMetric& level = slice(std::min(p.t, q.t));
  return level(p.x, q.x) + std::abs(p.t - q.t);
}

StabilizationReport neighborhood_stabilization(const FiniteMetric& base, const FiniteAction& action,
                                               const AtomSet& a, double radius, std::vector<double> ts) {
  if (radius < 0.0) fail(ErrorCode::invalid_argument, "neighborhood_stabilization: negative radius");
  if (ts.empty()) fail(ErrorCode::invalid_argument, "neighborhood_stabilization: no scales given");
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  StabilizationReport rep;
  rep.ts = ts;
  rep.target = ball_image(action, a, static_cast<int>(std::floor(radius)));
  rep.predicted_threshold = radius / base.min_positive();
  for (double t : ts) rep.neighborhoods.push_back(metric_neighborhood(warp(base, action, t), a, radius));

  int idx = static_cast<int>(ts.size());
  while (idx > 0 && rep.neighborhoods[idx - 1] == rep.target) --idx;
  rep.stabilizes = idx < static_cast<int>(ts.size());
  rep.first_stable = rep.stabilizes ? ts[idx] : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace explab
