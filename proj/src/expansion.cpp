#include "explab/expansion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "explab/simd.hpp"

namespace explab {

namespace {

void require_symbol_set(const FiniteAction& action, const std::vector<int>& S) {
  if (S.empty()) fail(ErrorCode::invalid_argument, "S is empty");
  std::set<int> seen;
  for (int s : S) {
    if (s < 0 || s >= action.gens().count()) fail(ErrorCode::invalid_argument, "S holds a bad generator index");
    if (!seen.insert(s).second) fail(ErrorCode::invalid_argument, "S repeats a generator");
  }
  for (int s : S)
    if (!seen.count(action.gens().inverse(s)))
      fail(ErrorCode::invalid_argument, "S is not closed under inverses at '" + action.gens().symbol(s) + "'");
  auto e = action.gens().identity();
  if (!e || !seen.count(*e))
    fail(ErrorCode::invalid_argument, "S must contain the identity symbol");
}

std::vector<int> local_index_map(int n, const AtomSet& Y) {
  std::vector<int> local(n, -1);
  int prev = -1;
  for (std::size_t i = 0; i < Y.size(); ++i) {
    if (Y[i] <= prev || Y[i] >= n) fail(ErrorCode::invalid_argument, "Y must be strictly increasing and in range");
    prev = Y[i];
    local[Y[i]] = static_cast<int>(i);
  }
  return local;
}

bool mask_lex_less(std::uint32_t a, std::uint32_t b) {
  std::uint32_t d = a ^ b;
  if (!d) return false;
  return a >> std::countr_zero(d) & 1u;
}

void require_scan_size(int ny, int cap, const char* who) {
  if (ny > cap)
    fail(ErrorCode::cap_exceeded, std::string(who) + ": " + std::to_string(ny) +
                                      " atoms exceeds the enumeration cap " + std::to_string(cap));
  if (ny > 30) fail(ErrorCode::cap_exceeded, std::string(who) + ": subset masks support at most 30 atoms");
}

}  // namespace

ActionKernel build_action_kernel(const FiniteAction& action, AtomSet Y, std::vector<int> S, const Tolerances& tol) {
  if (Y.empty()) fail(ErrorCode::invalid_argument, "action kernel: Y is empty");
  require_symbol_set(action, S);
  std::vector<int> local = local_index_map(action.size(), Y);
  const int ny = static_cast<int>(Y.size());
  const Vec& nu = action.space().weights();
  RadonNikodymTable rn(action);

  Vec sigma = Vec::Zero(ny), tilde = Vec::Zero(ny);
  Mat P = Mat::Zero(ny, ny);
  for (int i = 0; i < ny; ++i) {
    int x = Y[i];
    for (int s : S) {
      int y = action.apply(s, x);
      if (local[y] >= 0) sigma(i) += std::sqrt(rn.r(s, x));
    }
    // sigma >= 1 because the identity is in S and fixes Y pointwise.
    for (int s : S) {
      int y = action.apply(s, x);
      if (local[y] >= 0) P(i, local[y]) += std::sqrt(rn.r(s, x)) / sigma(i);
    }
    tilde(i) = sigma(i) * nu(x);
  }

  std::vector<std::string> ids;
  Vec w(ny);
  for (int i = 0; i < ny; ++i) {
    ids.push_back(action.space().id(Y[i]));
    w(i) = nu(Y[i]);
  }
  MarkovKernel kernel(FiniteMeasureSpace(std::move(ids), w), std::move(P), tilde, tol);
  return ActionKernel{action, std::move(Y), std::move(S), std::move(local), std::move(sigma), std::move(tilde),
                      std::move(kernel)};
}

ActionKernel build_action_kernel(const FiniteAction& action, const Tolerances& tol) {
  AtomSet Y(action.size());
  for (int i = 0; i < action.size(); ++i) Y[i] = i;
  std::vector<int> S(action.gens().count());
  for (int s = 0; s < action.gens().count(); ++s) S[s] = s;
  return build_action_kernel(action, std::move(Y), std::move(S), tol);
}

VertexExpansion vertex_expansion_constant(const FiniteAction& action, const AtomSet& Y, const std::vector<int>& S,
                                          int cap) {
  require_symbol_set(action, S);
  std::vector<int> local = local_index_map(action.size(), Y);
  const int ny = static_cast<int>(Y.size());
  require_scan_size(ny, cap, "vertex_expansion_constant");
  const Vec& nu = action.space().weights();

  std::vector<double> w(ny);
  std::vector<std::uint32_t> img(ny, 0);
  for (int i = 0; i < ny; ++i) {
    w[i] = nu(Y[i]);
    for (int s : S) {
      int y = action.apply(s, Y[i]);
      if (local[y] >= 0) img[i] |= 1u << local[y];
    }
  }
  double total = 0.0;
  for (double v : w) total += v;
  const double half = 0.5 * total, slack = 1e-12 * total;

  const auto& ops = simd::ops();
  double best_ratio = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  const std::uint64_t limit = 1ull << ny;
  for (std::uint64_t a = 1; a < limit; ++a) {
    std::uint32_t mask = static_cast<std::uint32_t>(a);
    double mass = ops.masked_dot(w.data(), mask, ny);
    if (mass > half + slack) continue;
    std::uint32_t image = 0;
    for (std::uint32_t rest = mask; rest;) {
      int i = std::countr_zero(rest);
      rest &= rest - 1;
      image |= img[i];
    }
    double ratio = ops.masked_dot(w.data(), image, ny) / mass;
    if (best_mask == 0) {
      best_ratio = ratio;
      best_mask = mask;
      continue;
    }
    double tie = 1e-12 * std::max(1.0, std::abs(best_ratio));
    if (ratio < best_ratio - tie) {
      best_ratio = ratio;
      best_mask = mask;
    } else if (ratio <= best_ratio + tie && mask_lex_less(mask, best_mask)) {
      best_mask = mask;
    }
  }

  VertexExpansion out;
  out.c = best_ratio - 1.0;
  for (int i = 0; i < ny; ++i)
    if (best_mask >> i & 1u) out.argmin.push_back(Y[i]);
  return out;
}

CheegerResult markov_expansion_constant(const ActionKernel& ak, int cap, const Tolerances& tol) {
  CheegerResult local = cheeger_exact(ak.kernel, ak.tilde_nu, cap, tol);
  for (int& i : local.argmin) i = ak.Y[i];
  return local;
}

EdgeVertexComparison edge_vertex_comparison(const ActionKernel& ak, int cap, const Tolerances& tol) {
  const int ny = ak.y_size();
  require_scan_size(ny, cap, "edge_vertex_comparison");
  EdgeVertexComparison rep;
  rep.theta = theta_bound(ak.action, ak.Y, ak.S);
  const double sqrt_theta = std::sqrt(rep.theta);
  const Mat mu = edge_measure(ak.kernel, ak.tilde_nu, tol);
  const Vec& w = ak.nu_local();
  const double s_count = static_cast<double>(ak.S.size());

  // Per-generator local images; -1 marks moves leaving Y.
  std::vector<std::vector<int>> img(ak.S.size(), std::vector<int>(ny, -1));
  for (std::size_t si = 0; si < ak.S.size(); ++si)
    for (int i = 0; i < ny; ++i) {
      int y = ak.action.apply(ak.S[si], ak.Y[i]);
      if (ak.local[y] >= 0) img[si][i] = ak.local[y];
    }

  const auto& ops = simd::ops();
  const std::uint32_t full = (ny == 32) ? ~0u : (1u << ny) - 1u;
  std::vector<double> wv(w.data(), w.data() + ny), tv(ak.tilde_nu.data(), ak.tilde_nu.data() + ny);
  rep.worst_lower = rep.worst_upper = rep.worst_measure = -std::numeric_limits<double>::infinity();
  for (std::uint64_t a = 1; a < (1ull << ny); ++a) {
    std::uint32_t mask = static_cast<std::uint32_t>(a);
    std::uint32_t outside = full & ~mask;
    double bd = 0.0;
    for (std::uint32_t rest = mask; rest;) {
      int x = std::countr_zero(rest);
      rest &= rest - 1;
      bd += ops.masked_dot(mu.data() + static_cast<std::ptrdiff_t>(x) * ny, outside, ny);
    }
    double vb = 0.0;
    for (std::size_t si = 0; si < ak.S.size(); ++si) {
      std::uint32_t image = 0;
      for (std::uint32_t rest = mask; rest;) {
        int x = std::countr_zero(rest);
        rest &= rest - 1;
        if (img[si][x] >= 0) image |= 1u << img[si][x];
      }
      vb += ops.masked_dot(wv.data(), image & ~mask, ny);
    }
    rep.worst_lower = std::max(rep.worst_lower, bd / sqrt_theta - vb);
    rep.worst_upper = std::max(rep.worst_upper, vb - sqrt_theta * bd);
    double na = ops.masked_dot(wv.data(), mask, ny);
    double ta = ops.masked_dot(tv.data(), mask, ny);
    rep.worst_measure = std::max({rep.worst_measure, na - ta, ta - s_count * sqrt_theta * na});
  }
  rep.bounds_hold = rep.worst_lower <= tol.identity && rep.worst_upper <= tol.identity &&
                    rep.worst_measure <= tol.identity;
  return rep;
}

ExpansionProfile asymptotic_profile(const FiniteAction& action, const AtomSet& Y, const std::vector<double>& alphas,
                                    int k_max, const std::vector<double>& betas, int cap) {
  std::vector<int> local = local_index_map(action.size(), Y);
  const int ny = static_cast<int>(Y.size());
  require_scan_size(ny, cap, "asymptotic_profile");
  if (k_max < 1) fail(ErrorCode::invalid_argument, "asymptotic_profile: k_max must be >= 1");
  const Vec& nu = action.space().weights();

  std::vector<double> w(ny);
  for (int i = 0; i < ny; ++i) w[i] = nu(Y[i]);
  double total = 0.0;
  for (double v : w) total += v;
  const double slack = 1e-12 * total;

  // Window [lo, hi] on nu(A) for each profile entry.
  struct Window {
    double param, lo, hi;
    bool done = false;
    ProfileEntry entry;
  };
  std::vector<Window> windows;
  for (double a : alphas) windows.push_back({a, a * total, 0.5 * total, false, {}});
  std::size_t lower_count = windows.size();
  for (double b : betas) windows.push_back({b, 0.5 * total, b * total, false, {}});
  for (auto& win : windows) {
    win.entry.alpha = win.param;
    win.entry.k = 0;
  }

  // Word-length balls around each Y atom, restricted to Y, per radius.
  std::vector<std::vector<std::uint32_t>> ball(k_max + 1, std::vector<std::uint32_t>(ny, 0));
  for (int i = 0; i < ny; ++i) {
    AtomSet one{Y[i]};
    for (int k = 1; k <= k_max; ++k) {
      std::uint32_t mask = 0;
      for (int x : ball_image(action, one, k))
        if (local[x] >= 0) mask |= 1u << local[x];
      ball[k][i] = mask;
    }
  }

  const auto& ops = simd::ops();
  for (int k = 1; k <= k_max; ++k) {
    bool any_pending = false;
    for (auto& win : windows) any_pending |= !win.done;
    if (!any_pending) break;
    std::vector<double> min_ratio(windows.size(), std::numeric_limits<double>::infinity());
    std::vector<std::uint32_t> argmin(windows.size(), 0);
    for (std::uint64_t a = 1; a < (1ull << ny); ++a) {
      std::uint32_t mask = static_cast<std::uint32_t>(a);
      double mass = ops.masked_dot(w.data(), mask, ny);
      std::uint32_t image = 0;
      bool wanted = false;
      for (std::size_t wi = 0; wi < windows.size(); ++wi)
        wanted |= !windows[wi].done && mass >= windows[wi].lo - slack && mass <= windows[wi].hi + slack;
      if (!wanted) continue;
      for (std::uint32_t rest = mask; rest;) {
        int i = std::countr_zero(rest);
        rest &= rest - 1;
        image |= ball[k][i];
      }
      double ratio = ops.masked_dot(w.data(), image, ny) / mass;
      for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        auto& win = windows[wi];
        if (win.done || mass < win.lo - slack || mass > win.hi + slack) continue;
        if (ratio < min_ratio[wi] || (ratio == min_ratio[wi] && mask_lex_less(mask, argmin[wi]))) {
          min_ratio[wi] = ratio;
          argmin[wi] = mask;
        }
      }
    }
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      auto& win = windows[wi];
      if (win.done) continue;
      if (std::isinf(min_ratio[wi])) {
        win.entry.vacuous = true;
        win.entry.expanding = true;
        win.done = true;
        continue;
      }
      win.entry.k = k;
      win.entry.c = min_ratio[wi] - 1.0;
      win.entry.witness.clear();
      for (int i = 0; i < ny; ++i)
        if (argmin[wi] >> i & 1u) win.entry.witness.push_back(Y[i]);
      if (min_ratio[wi] > 1.0) {
        win.entry.expanding = true;
        win.done = true;
      }
    }
  }

  ExpansionProfile out;
  out.k_max = k_max;
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    auto& e = windows[wi].entry;
    if (!windows[wi].done) e.expanding = false;  // scanned every k <= k_max without strict growth
    (wi < lower_count ? out.lower : out.upper).push_back(e);
  }
  return out;
}

LocalGapReport local_spectral_gap(const FiniteAction& action, const AtomSet& Y, const std::vector<int>& S,
                                  const Tolerances& tol) {
  require_symbol_set(action, S);
  std::vector<int> local = local_index_map(action.size(), Y);
  const int ny = static_cast<int>(Y.size());
  const Vec& nu = action.space().weights();
  LocalGapReport rep;

  ActionKernel ak = build_action_kernel(action, Y, S, tol);
  rep.lambda2 = spectrum(ak.kernel, ak.tilde_nu, tol).lambda2;
  rep.kappa_from_markov = rep.lambda2 < 1.0 - tol.eigen
                              ? 1.0 / std::sqrt(2.0 * (1.0 - rep.lambda2))
                              : std::numeric_limits<double>::infinity();

  // Coordinates touched by moves out of Y; Y atoms come first.
  std::vector<int> coord_of(action.size(), -1);
  std::vector<int> coords;
  for (int x : Y) {
    coord_of[x] = static_cast<int>(coords.size());
    coords.push_back(x);
  }
  for (int x : Y)
    for (int s : S) {
      int y = action.apply(s, x);
      if (coord_of[y] < 0) {
        coord_of[y] = static_cast<int>(coords.size());
        coords.push_back(y);
      }
    }
  const int nz = static_cast<int>(coords.size());

  // Union-find over the move graph to count coupling components of Y.
  std::vector<int> parent(nz);
  for (int i = 0; i < nz; ++i) parent[i] = i;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  Mat L = Mat::Zero(nz, nz);
  for (int x : Y)
    for (int s : S) {
      int y = action.apply(s, x);
      if (y == x) continue;
      int i = coord_of[x], j = coord_of[y];
      L(i, i) += nu(x);
      L(j, j) += nu(x);
      L(i, j) -= nu(x);
      L(j, i) -= nu(x);
      parent[find(i)] = find(j);
    }
  std::set<int> roots;
  for (int x : Y) roots.insert(find(coord_of[x]));
  rep.coupling_components = static_cast<int>(roots.size());

  if (ny < 2) {
    rep.lambda_q = std::numeric_limits<double>::infinity();
    rep.has_gap = true;
    rep.kappa_lo = rep.kappa_hi = 0.0;
    return rep;
  }

  // Outside coordinates only couple into Y, so the outside block is diagonal
  // and the elimination is exact.
  Mat l_yy = L.topLeftCorner(ny, ny);
  if (nz > ny) {
    Mat l_yo = L.topRightCorner(ny, nz - ny);
    Vec d_o = L.bottomRightCorner(nz - ny, nz - ny).diagonal();
    l_yy -= l_yo * d_o.cwiseInverse().asDiagonal() * l_yo.transpose();
  }

  Vec root_w(ny);
  for (int i = 0; i < ny; ++i) root_w(i) = std::sqrt(nu(Y[i]));
  Mat m_sym = root_w.cwiseInverse().asDiagonal() * l_yy * root_w.cwiseInverse().asDiagonal();

  Eigen::HouseholderQR<Mat> qr{Mat(root_w)};
  Mat q = qr.householderQ();
  Mat basis = q.rightCols(ny - 1);
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(basis.transpose() * m_sym * basis));
  if (es.info() != Eigen::Success) fail(ErrorCode::invalid_argument, "local_spectral_gap: eigensolver failed");
  double lq = es.eigenvalues()(0);
  if (lq < -1e-9) fail(ErrorCode::tolerance, "local_spectral_gap: reduced form came out indefinite");
  rep.lambda_q = std::max(lq, 0.0);
  rep.has_gap = rep.lambda_q > 1e-12;
  if (rep.has_gap) {
    rep.kappa_lo = 1.0 / std::sqrt(static_cast<double>(S.size()) * rep.lambda_q);
    rep.kappa_hi = 1.0 / std::sqrt(rep.lambda_q);
  } else {
    rep.kappa_lo = rep.kappa_hi = std::numeric_limits<double>::infinity();
  }
  return rep;
}

}  // namespace explab
