#include "explab/cheeger.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "explab/simd.hpp"

namespace explab {

namespace {

// Set-lexicographic order on bitmask subsets: the set holding the smallest
// differing atom comes first. Agrees with comparing sorted index lists.
bool mask_lex_less(std::uint32_t a, std::uint32_t b) {
  std::uint32_t d = a ^ b;
  if (!d) return false;
  return a >> std::countr_zero(d) & 1u;
}

double cut_of_mask(const Mat& mu, std::uint32_t mask, std::uint32_t full, int n) {
  const auto& ops = simd::ops();
  std::uint32_t outside = full & ~mask;
  double cut = 0.0;
  for (std::uint32_t rest = mask; rest;) {
    int x = std::countr_zero(rest);
    rest &= rest - 1;
    cut += ops.masked_dot(mu.data() + static_cast<std::ptrdiff_t>(x) * n, outside, n);
  }
  return cut;
}

}  // namespace

CheegerResult cheeger_exact(const MarkovKernel& k, const Vec& m, int cap, const Tolerances& tol) {
  const int n = k.size();
  if (n < 2) fail(ErrorCode::invalid_argument, "cheeger_exact: need at least two atoms");
  if (n > cap)
    fail(ErrorCode::cap_exceeded, "cheeger_exact: " + std::to_string(n) + " atoms exceeds the enumeration cap " +
                                      std::to_string(cap));
  if (n > 30) fail(ErrorCode::cap_exceeded, "cheeger_exact: subset masks support at most 30 atoms");

  const Mat mu = edge_measure(k, m, tol);
  const double total = m.sum();
  const double half = 0.5 * total;
  const double half_slack = 1e-12 * total;  // admit m(A) = m(X)/2 despite summation rounding
  const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1u;

  double best_ratio = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;

  // Atom 0 stays outside the scanned mask, so each complement pair {A, X\A}
  // is visited exactly once; both orientations are offered to the minimum.
  const std::uint64_t limit = 1ull << (n - 1);
  for (std::uint64_t g = 1; g < limit; ++g) {
    std::uint32_t mask = static_cast<std::uint32_t>(g) << 1;
    double mass = 0.0;
    for (std::uint32_t rest = mask; rest;) {
      int x = std::countr_zero(rest);
      rest &= rest - 1;
      mass += m(x);
    }
    double cut = -1.0;
    auto offer = [&](std::uint32_t a_mask, double a_mass) {
      if (a_mass > half + half_slack) return;
      if (cut < 0.0) cut = cut_of_mask(mu, mask, full, n);
      double ratio = cut / a_mass;
      if (best_mask == 0) {
        best_ratio = ratio;
        best_mask = a_mask;
        return;
      }
      double tie = 1e-12 * std::max(1.0, std::abs(best_ratio));
      if (ratio < best_ratio - tie) {
        best_ratio = ratio;
        best_mask = a_mask;
      } else if (ratio <= best_ratio + tie && mask_lex_less(a_mask, best_mask)) {
        best_mask = a_mask;
      }
    };
    offer(mask, mass);
    offer(full & ~mask, total - mass);
  }

  CheegerResult out;
  out.argmin = mask_to_set(best_mask);
  // Recompute the reported ratio from the winning subset alone.
  double best_mass = 0.0;
  for (int i : out.argmin) best_mass += m(i);
  out.kappa = cut_of_mask(mu, best_mask, full, n) / best_mass;
  return out;
}

CheegerResult cheeger_sweep(const MarkovKernel& k, const Vec& m, const Tolerances& tol) {
  const int n = k.size();
  if (n < 2) fail(ErrorCode::invalid_argument, "cheeger_sweep: need at least two atoms");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(k, m, tol));
  if (es.info() != Eigen::Success) fail(ErrorCode::invalid_argument, "cheeger_sweep: eigensolver failed");
  Vec v = es.eigenvectors().col(n - 2);  // second largest eigenvalue
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ga = v(a) / std::sqrt(m(a)), gb = v(b) / std::sqrt(m(b));
    return ga != gb ? ga > gb : a < b;
  });

  const Mat mu = edge_measure(k, m, tol);
  const double total = m.sum();
  const double half = 0.5 * total;
  const double half_slack = 1e-12 * total;

  std::vector<char> inside(n, 0);
  double mass = 0.0;
  double best = std::numeric_limits<double>::infinity();
  int best_prefix = 1;
  bool best_complement = false;
  for (int i = 0; i + 1 < n; ++i) {
    inside[order[i]] = 1;
    mass += m(order[i]);
    double cut = 0.0;
    for (int x = 0; x < n; ++x) {
      if (!inside[x]) continue;
      for (int y = 0; y < n; ++y)
        if (!inside[y]) cut += mu(x, y);
    }
    if (mass <= half + half_slack && cut / mass < best) {
      best = cut / mass;
      best_prefix = i + 1;
      best_complement = false;
    }
    if (total - mass <= half + half_slack && cut / (total - mass) < best) {
      best = cut / (total - mass);
      best_prefix = i + 1;
      best_complement = true;
    }
  }

  CheegerResult out;
  out.kappa = best;
  std::vector<char> chosen(n, 0);
  for (int i = 0; i < best_prefix; ++i) chosen[order[i]] = 1;
  for (int x = 0; x < n; ++x)
    if (chosen[x] != (best_complement ? 1 : 0)) out.argmin.push_back(x);
  return out;
}

SandwichReport cheeger_sandwich(const MarkovKernel& k, const Vec& m, int cap, const Tolerances& tol) {
  SandwichReport rep;
  CheegerResult exact = cheeger_exact(k, m, cap, tol);
  CheegerResult sweep = cheeger_sweep(k, m, tol);
  SpectralReport sr = spectrum(k, m, tol);
  rep.kappa = exact.kappa;
  rep.argmin = exact.argmin;
  rep.kappa_upper = sweep.kappa;
  rep.lambda2 = sr.lambda2;
  rep.spectral_gap = sr.spectral_gap;
  rep.lower = 0.5 * exact.kappa * exact.kappa;
  rep.upper = 2.0 * exact.kappa;
  rep.holds = rep.lower - tol.eigen <= rep.spectral_gap && rep.spectral_gap <= rep.upper + tol.eigen;
  return rep;
}

}  // namespace explab
