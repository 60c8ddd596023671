#include "explab/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "explab/simd.hpp"

namespace explab {

namespace {

void require_atoms(int n, const AtomSet& a, const char* who) {
  int prev = -1;
  for (int x : a) {
    if (x <= prev || x >= n) fail(ErrorCode::invalid_argument, std::string(who) + ": bad atom set");
    prev = x;
  }
}

Mat submatrix(const Mat& a, const AtomSet& rows, const AtomSet& cols) {
  Mat sub(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = a(rows[i], cols[j]);
  return sub;
}

double symmetric_norm(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorCode::invalid_argument, "eigensolver failed on a symmetric matrix");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

WeightedOperator from_function_kernel(const FiniteMeasureSpace& space, const Mat& k) {
  const int n = space.size();
  if (k.rows() != n || k.cols() != n) fail(ErrorCode::invalid_argument, "operator: kernel shape mismatch");
  Vec root = space.weights().cwiseSqrt();
  return {space, root.asDiagonal() * k * root.cwiseInverse().asDiagonal()};
}

WeightedOperator identity_operator(const FiniteMeasureSpace& space) {
  return {space, Mat::Identity(space.size(), space.size())};
}

WeightedOperator generator_operator(const FiniteAction& action, int s) {
  if (s < 0 || s >= action.gens().count()) fail(ErrorCode::invalid_argument, "generator_operator: bad symbol");
  const int n = action.size();
  Mat a = Mat::Zero(n, n);
  // Half densities make the action unitary, so frame vectors just permute.
  for (int y = 0; y < n; ++y) a(action.apply(s, y), y) = 1.0;
  return {action.space(), std::move(a)};
}

WeightedOperator compose(const WeightedOperator& a, const WeightedOperator& b) {
  if (!a.space.same_atoms(b.space)) fail(ErrorCode::invalid_argument, "compose: operators live on different spaces");
  return {a.space, a.a * b.a};
}

double operator_norm(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

double operator_norm(const WeightedOperator& t) { return operator_norm(t.a); }

RankOneProjection averaging_projection(const FiniteMeasureSpace& space, const AtomSet& y) {
  if (y.empty()) fail(ErrorCode::invalid_argument, "averaging_projection: empty set");
  require_atoms(space.size(), y, "averaging_projection");
  double mass = space.mass(y);
  Vec xi = Vec::Zero(space.size());
  for (int x : y) xi(x) = std::sqrt(space.weight(x) / mass);
  return {space, std::move(xi)};
}

double cut_norm(const Mat& a, const AtomSet& rows, const AtomSet& cols) {
  require_atoms(static_cast<int>(a.rows()), rows, "cut_norm");
  require_atoms(static_cast<int>(a.cols()), cols, "cut_norm");
  if (rows.empty() || cols.empty()) return 0.0;
  return operator_norm(submatrix(a, rows, cols));
}

double cut_norm(const WeightedOperator& t, const AtomSet& rows, const AtomSet& cols) {
  return cut_norm(t.a, rows, cols);
}

double cut_norm(const RankOneProjection& p, const AtomSet& rows, const AtomSet& cols) {
  require_atoms(static_cast<int>(p.xi.size()), rows, "cut_norm");
  require_atoms(static_cast<int>(p.xi.size()), cols, "cut_norm");
  double r = 0.0, c = 0.0;
  for (int x : rows) r += p.xi(x) * p.xi(x);
  for (int x : cols) c += p.xi(x) * p.xi(x);
  return std::sqrt(r) * std::sqrt(c);
}

std::optional<int> rho_propagation(const WeightedOperator& t, const FiniteAction& action, double entry_tol) {
  const int n = action.size();
  if (t.a.rows() != n || t.a.cols() != n) fail(ErrorCode::invalid_argument, "rho_propagation: size mismatch");
  auto dist = orbit_distance_table(action);
  int prop = 0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (std::abs(t.a(x, y)) <= entry_tol) continue;
      if (dist[x][y] < 0) return std::nullopt;
      prop = std::max(prop, dist[x][y]);
    }
  return prop;
}

WeightedOperator truncate_to_propagation(const WeightedOperator& t, const FiniteAction& action, int k) {
  const int n = action.size();
  if (t.a.rows() != n || t.a.cols() != n) fail(ErrorCode::invalid_argument, "truncate: size mismatch");
  if (k < 0) fail(ErrorCode::invalid_argument, "truncate: negative radius");
  auto dist = orbit_distance_table(action);
  WeightedOperator out{t.space, t.a};
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (dist[x][y] < 0 || dist[x][y] > k) out.a(x, y) = 0.0;
  return out;
}

namespace {

// Shared scan behind both quasi-locality profiles. `zone[x]` is the set of
// atoms a pair containing x must avoid on the other side; the optimal C for a
// given A is the complement of the union of zones over A.
struct SeparationScan {
  const Mat& a;
  const std::vector<AtomSet>& zone;
  int exact_cap;
  std::uint64_t seed;
  int samples;

  double eps = 0.0;
  AtomSet best_a, best_c;

  void run() {
    const int n = static_cast<int>(a.rows());
    if (n <= exact_cap && n <= 30)
      exact(n);
    else
      sampled(n);
  }

  bool exact_mode() const { return static_cast<int>(a.rows()) <= exact_cap && a.rows() <= 30; }

 private:
  void offer(const AtomSet& sa, const AtomSet& sc, double val) {
    if (val > eps) {
      eps = val;
      best_a = sa;
      best_c = sc;
    }
  }

  void exact(int n) {
    std::vector<std::uint32_t> zone_mask(n, 0);
    for (int x = 0; x < n; ++x)
      for (int y : zone[x]) zone_mask[x] |= 1u << y;
    const std::uint32_t full = (n == 32) ? ~0u : (1u << n) - 1u;

    // Rank-one inputs factor the cut norm through the singular vectors.
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    bool rank_one = sv.size() < 2 || sv(1) <= 1e-12 * std::max(1.0, sv(0));
    std::vector<double> u2(n, 0.0), v2(n, 0.0);
    if (rank_one && sv.size() > 0) {
      for (int x = 0; x < n; ++x) {
        u2[x] = svd.matrixU()(x, 0) * svd.matrixU()(x, 0);
        v2[x] = svd.matrixV()(x, 0) * svd.matrixV()(x, 0);
      }
    }

    const auto& ops = simd::ops();
    for (std::uint64_t m = 1; m < (1ull << n); ++m) {
      std::uint32_t amask = static_cast<std::uint32_t>(m);
      std::uint32_t covered = 0;
      for (std::uint32_t rest = amask; rest;) {
        int x = std::countr_zero(rest);
        rest &= rest - 1;
        covered |= zone_mask[x];
      }
      std::uint32_t cmask = full & ~covered;
      if (!cmask) continue;
      double val;
      if (rank_one) {
        val = sv.size() > 0
                  ? sv(0) * std::sqrt(ops.masked_dot(u2.data(), amask, n) * ops.masked_dot(v2.data(), cmask, n))
                  : 0.0;
      } else {
        val = operator_norm(submatrix(a, mask_to_set(amask), mask_to_set(cmask)));
      }
      if (val > eps) {
        eps = val;
        best_a = mask_to_set(amask);
        best_c = mask_to_set(cmask);
      }
    }
  }

  AtomSet complement_of_union(int n, const AtomSet& sa, std::vector<char>& covered) const {
    std::fill(covered.begin(), covered.end(), 0);
    for (int x : sa)
      for (int y : zone[x]) covered[y] = 1;
    AtomSet sc;
    for (int y = 0; y < n; ++y)
      if (!covered[y]) sc.push_back(y);
    return sc;
  }

  void sampled(int n) {
    std::vector<char> covered(n, 0);
    // Singletons first: they have the largest admissible C and give a floor.
    for (int x = 0; x < n; ++x) {
      AtomSet sa{x};
      AtomSet sc = complement_of_union(n, sa, covered);
      if (sc.empty()) continue;
      double val = 0.0;
      for (int y : sc) val += a(x, y) * a(x, y);
      offer(sa, sc, std::sqrt(val));
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int draw = 0; draw < samples; ++draw) {
      AtomSet sa;
      while (sa.empty()) {
        sa.clear();
        std::uint64_t bits = rng();
        for (int x = 0; x < n; ++x) {
          if (x % 64 == 0 && x > 0) bits = rng();
          if (bits >> (x % 64) & 1ull) sa.push_back(x);
        }
      }
      AtomSet sc = complement_of_union(n, sa, covered);
      if (sc.empty()) continue;
      Vec v = Vec::Zero(n);
      for (int y : sc) v(y) = gauss(rng);
      double vn = v.norm();
      if (vn == 0.0) continue;
      v /= vn;
      Vec u = a * v;
      double val = 0.0;
      for (int x : sa) val += u(x) * u(x);
      offer(sa, sc, std::sqrt(val));
    }

    // Report the exact cut norm of the best pair found so re-evaluating the
    // witness reproduces eps; the profile stays a lower bound on the sup.
    if (!best_a.empty()) eps = operator_norm(submatrix(a, best_a, best_c));
  }
};

}  // namespace

QuasiLocalityProfile rho_quasi_locality_profile(const WeightedOperator& t, const FiniteAction& action,
                                                const std::vector<int>& ks, int exact_cap, std::uint64_t seed,
                                                int samples) {
  const int n = action.size();
  if (t.a.rows() != n || t.a.cols() != n) fail(ErrorCode::invalid_argument, "quasi-locality: size mismatch");
  QuasiLocalityProfile out;
  for (int k : ks) {
    if (k < 0) fail(ErrorCode::invalid_argument, "quasi-locality: negative radius");
    std::vector<AtomSet> zone(n);
    for (int x = 0; x < n; ++x) zone[x] = ball_image(action, AtomSet{x}, k);
    SeparationScan scan{t.a, zone, exact_cap, seed + static_cast<std::uint64_t>(k), samples};
    scan.run();
    out.radii.push_back(static_cast<double>(k));
    out.eps.push_back(scan.eps);
    out.witnesses.emplace_back(std::move(scan.best_a), std::move(scan.best_c));
    out.exact = out.exact && scan.exact_mode();
  }
  return out;
}

QuasiLocalityProfile warped_quasi_locality_profile(const WeightedOperator& t, const FiniteMetric& warped,
                                                   const std::vector<double>& rs, int exact_cap, std::uint64_t seed,
                                                   int samples) {
  const int n = warped.size();
  if (t.a.rows() != n || t.a.cols() != n) fail(ErrorCode::invalid_argument, "quasi-locality: size mismatch");
  QuasiLocalityProfile out;
  std::uint64_t salt = 0;
  for (double r : rs) {
    if (r < 0.0) fail(ErrorCode::invalid_argument, "quasi-locality: negative radius");
    // Separation is strict, so the forbidden zone is the closed ball.
    std::vector<AtomSet> zone(n);
    for (int x = 0; x < n; ++x) zone[x] = warped_ball(warped, x, r);
    SeparationScan scan{t.a, zone, exact_cap, seed + salt++, samples};
    scan.run();
    out.radii.push_back(r);
    out.eps.push_back(scan.eps);
    out.witnesses.emplace_back(std::move(scan.best_a), std::move(scan.best_c));
    out.exact = out.exact && scan.exact_mode();
  }
  return out;
}

RankOneProjection hat_embedding_projection(const ActionKernel& ak) {
  const FiniteMeasureSpace& space = ak.action.space();
  double tilde_total = ak.tilde_nu.sum();
  Vec xi = Vec::Zero(space.size());
  for (int i = 0; i < ak.y_size(); ++i) xi(ak.Y[i]) = std::sqrt(ak.tilde_nu(i) / tilde_total);
  return {space, std::move(xi)};
}

namespace {

// Pad a Y-block matrix to the full space.
Mat pad_to_space(const Mat& block, const AtomSet& y, int n) {
  Mat out = Mat::Zero(n, n);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out(y[i], y[j]) = block(i, j);
  return out;
}

double lambda_hat_of(const SpectralReport& sr) {
  if (sr.eigenvalues.size() < 2) return 0.0;
  return std::max(std::abs(sr.eigenvalues(1)), std::abs(sr.eigenvalues(sr.eigenvalues.size() - 1)));
}

}  // namespace

PowerReport markov_power_report(const ActionKernel& ak, int n_max, const Tolerances& tol) {
  if (n_max < 1) fail(ErrorCode::invalid_argument, "markov_power_report: n_max must be >= 1");
  PowerReport rep;
  SpectralReport sr = spectrum(ak.kernel, ak.tilde_nu, tol);
  rep.lambda_hat = lambda_hat_of(sr);
  rep.has_gap = rep.lambda_hat < 1.0 - tol.eigen;
  for (int s : ak.S) rep.max_length = std::max(rep.max_length, ak.action.gens().length(s));

  const int ny = ak.y_size();
  Mat m_sym = symmetrized(ak.kernel, ak.tilde_nu, tol);
  Vec xi = ak.tilde_nu.cwiseSqrt();
  xi /= xi.norm();
  Mat p_inf = xi * xi.transpose();

  auto dist = orbit_distance_table(ak.action);
  rep.norms_bounded = true;
  rep.propagation_bounded = true;
  Mat cur = Mat::Identity(ny, ny);
  for (int n = 1; n <= n_max; ++n) {
    cur = cur * m_sym;
    rep.norms.push_back(symmetric_norm(cur - p_inf));
    rep.bounds.push_back(std::pow(rep.lambda_hat, n));
    int prop = 0;
    for (int i = 0; i < ny && prop >= 0; ++i)
      for (int j = 0; j < ny; ++j) {
        if (std::abs(cur(i, j)) <= 1e-12) continue;
        int d = dist[ak.Y[i]][ak.Y[j]];
        if (d < 0) {
          prop = -1;
          break;
        }
        prop = std::max(prop, d);
      }
    rep.propagation.push_back(prop);
    if (rep.norms.back() > rep.bounds.back() + tol.identity) rep.norms_bounded = false;
    if (prop < 0 || prop > n * rep.max_length) rep.propagation_bounded = false;
  }
  return rep;
}

AdReport ad_embedding_report(const ActionKernel& ak, int n_max, const Tolerances& tol) {
  if (n_max < 0) fail(ErrorCode::invalid_argument, "ad_embedding_report: negative n_max");
  const int ny = ak.y_size();
  const int n = ak.action.size();
  double nu_y = ak.nu_local().sum();
  double tilde_y = ak.tilde_nu.sum();

  Vec jinv = ak.sigma.cwiseSqrt().cwiseInverse();  // frame matrix of the zero-extension embedding
  Vec xi = ak.tilde_nu.cwiseSqrt();
  xi /= xi.norm();
  Mat ad_block = (jinv.asDiagonal() * xi) * (jinv.asDiagonal() * xi).transpose();
  AdReport rep{nu_y / tilde_y, WeightedOperator{ak.action.space(), pad_to_space(ad_block, ak.Y, n)}, 0.0, false, {}};

  RankOneProjection p_y = averaging_projection(ak.action.space(), ak.Y);
  rep.identity_deviation = symmetric_norm(rep.ad.a - rep.scale * p_y.matrix());

  SpectralReport sr = spectrum(ak.kernel, ak.tilde_nu, tol);
  rep.has_gap = lambda_hat_of(sr) < 1.0 - tol.eigen;
  Mat m_sym = symmetrized(ak.kernel, ak.tilde_nu, tol);
  Mat p_inf = xi * xi.transpose();
  Mat cur = Mat::Identity(ny, ny);
  for (int k = 1; k <= n_max; ++k) {
    cur = cur * m_sym;
    rep.power_norms.push_back(symmetric_norm(jinv.asDiagonal() * (cur - p_inf) * jinv.asDiagonal()));
  }
  return rep;
}

std::vector<GhostLevel> ghost_profile(const RankOneProjection& p, WarpedCone& cone, const std::vector<double>& ts,
                                      double radius) {
  const int n = cone.base().size();
  if (p.xi.size() != n) fail(ErrorCode::invalid_argument, "ghost_profile: projection lives on a different space");
  std::vector<GhostLevel> out;
  for (double t : ts) {
    const FiniteMetric& level = cone.slice(t);
    GhostLevel g{t, -1.0, 0};
    for (int x = 0; x < n; ++x) {
      double mass = 0.0;
      for (int y : open_warped_ball(level, x, radius)) mass += p.xi(y) * p.xi(y);
      if (std::sqrt(mass) > g.g) {
        g.g = std::sqrt(mass);
        g.argmax = x;
      }
    }
    out.push_back(g);
  }
  return out;
}

std::vector<GhostLevel> ghost_profile_refining(const std::vector<RefiningLevel>& levels, double radius) {
  std::vector<GhostLevel> out;
  for (const auto& level : levels) {
    if (level.action.size() != level.base.size())
      fail(ErrorCode::invalid_argument, "ghost_profile: level action and metric disagree");
    FiniteMetric warped = warp(level.base, level.action, level.t);
    const Vec& w = level.action.space().weights();
    double total = w.sum();
    GhostLevel g{level.t, -1.0, 0};
    for (int x = 0; x < level.base.size(); ++x) {
      double mass = 0.0;
      for (int y : open_warped_ball(warped, x, radius)) mass += w(y);
      mass /= total;
      if (std::sqrt(mass) > g.g) {
        g.g = std::sqrt(mass);
        g.argmax = x;
      }
    }
    out.push_back(g);
  }
  return out;
}

PropagationWitness finite_propagation_witness(const ActionKernel& ak, int k, const Tolerances& tol) {
  if (k < 0) fail(ErrorCode::invalid_argument, "finite_propagation_witness: negative radius");
  PropagationWitness rep;
  rep.k = k;
  int max_len = 0;
  for (int s : ak.S) max_len = std::max(max_len, ak.action.gens().length(s));
  rep.power_n = max_len > 0 ? k / max_len : 0;

  const int ny = ak.y_size();
  Mat m_sym = symmetrized(ak.kernel, ak.tilde_nu, tol);
  Vec xi = ak.tilde_nu.cwiseSqrt();
  xi /= xi.norm();
  Mat p_inf = xi * xi.transpose();
  Mat cur = Mat::Identity(ny, ny);
  for (int i = 0; i < rep.power_n; ++i) cur = cur * m_sym;
  rep.power_bound = symmetric_norm(cur - p_inf);

  WeightedOperator proj{ak.action.space(), pad_to_space(p_inf, ak.Y, ak.action.size())};
  WeightedOperator trunc = truncate_to_propagation(proj, ak.action, k);
  rep.truncation_bound = symmetric_norm(proj.a - trunc.a);
  return rep;
}

PoincareReport poincare_obstruction_witness(const ActionKernel& ak, const FiniteMetric& base,
                                            const std::vector<double>& ts, const std::vector<Mat>& embeddings,
                                            const Tolerances& tol) {
  if (ts.size() != embeddings.size())
    fail(ErrorCode::invalid_argument, "poincare: one embedding per scale required");
  const int n = ak.action.size();
  const Vec& nu = ak.action.space().weights();
  SpectralReport sr = spectrum(ak.kernel, ak.tilde_nu, tol);
  double theta = theta_bound(ak.action, ak.Y, ak.S);
  bool gap = sr.lambda2 < 1.0 - tol.eigen;
  double kappa = gap ? 1.0 / (2.0 * (1.0 - sr.lambda2)) : std::numeric_limits<double>::infinity();

  double nu_y = 0.0, nu_min = std::numeric_limits<double>::infinity();
  for (int x : ak.Y) {
    nu_y += nu(x);
    nu_min = std::min(nu_min, nu(x));
  }

  PoincareReport rep;
  for (std::size_t lvl = 0; lvl < ts.size(); ++lvl) {
    const Mat& f = embeddings[lvl];
    if (f.rows() != n) fail(ErrorCode::invalid_argument, "poincare: embedding rows must match the atom count");
    PoincareLevel out;
    out.t = ts[lvl];
    out.lambda2 = sr.lambda2;
    out.kappa = kappa;
    out.theta = theta;

    for (int j = 0; j < f.cols(); ++j) {
      double mean = 0.0;
      for (int x : ak.Y) mean += f(x, j) * nu(x);
      mean /= nu_y;
      for (int x : ak.Y) {
        double c = f(x, j) - mean;
        out.lhs += c * c * nu(x);
      }
    }

    double energy = 0.0;
    for (int s : ak.S)
      for (int x : ak.Y) {
        int y = ak.action.apply(s, x);
        if (ak.local[y] < 0) continue;
        energy += (f.row(x) - f.row(y)).squaredNorm() * nu(x);
      }
    out.rhs = energy > 0.0 ? kappa * std::sqrt(theta) * energy : (std::isinf(kappa) ? kappa : 0.0);
    out.holds = out.lhs <= out.rhs + tol.eigen;

    FiniteMetric warped = warp(base, ak.action, ts[lvl]);
    out.max_warped_distance = warped.matrix().maxCoeff();
    for (std::size_t i = 0; i < ak.Y.size(); ++i)
      for (std::size_t j = i + 1; j < ak.Y.size(); ++j)
        out.image_spread = std::max(out.image_spread, (f.row(ak.Y[i]) - f.row(ak.Y[j])).norm());
    out.spread_bound = 2.0 * std::sqrt(out.lhs / nu_min);

    rep.all_hold = rep.all_hold && out.holds;
    rep.levels.push_back(out);
  }
  return rep;
}

}  // namespace explab
