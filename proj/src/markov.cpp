#include "explab/markov.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace explab {

MarkovKernel::MarkovKernel(FiniteMeasureSpace space, Mat transition, std::optional<Vec> reversing_measure,
                           const Tolerances& tol)
    : space_(std::move(space)), P_(std::move(transition)), m_(std::move(reversing_measure)) {
  const int n = space_.size();
  if (P_.rows() != n || P_.cols() != n)
    fail(ErrorCode::invalid_argument, "kernel: transition matrix must be " + std::to_string(n) + "x" +
                                          std::to_string(n));
  for (int x = 0; x < n; ++x) {
    double row = 0.0;
    for (int y = 0; y < n; ++y) {
      if (P_(x, y) < -tol.row_sum)
        fail(ErrorCode::invalid_argument,
             "kernel: negative transition at (" + space_.id(x) + "," + space_.id(y) + ")");
      row += P_(x, y);
    }
    if (std::abs(row - 1.0) > tol.row_sum)
      fail(ErrorCode::tolerance, "kernel: row " + space_.id(x) + " sums to " + std::to_string(row));
  }
  if (m_) {
    if (m_->size() != n) fail(ErrorCode::invalid_argument, "kernel: reversing measure has wrong length");
    for (int x = 0; x < n; ++x)
      if ((*m_)(x) <= 0.0)
        fail(ErrorCode::invalid_argument, "kernel: reversing measure not strictly positive at " + space_.id(x));
    require_reversible(*this, *m_, tol.detailed_balance);
  }
}

const Vec& MarkovKernel::reversing_or_fail(const Tolerances& tol) const {
  if (m_) return *m_;
  BalanceResidual r = detailed_balance_residual(P_, space_.weights());
  if (r.value <= tol.detailed_balance) return space_.weights();
  fail(ErrorCode::invalid_argument, "kernel has no reversing measure and the space weights do not reverse it");
}

BalanceResidual detailed_balance_residual(const Mat& P, const Vec& m) {
  BalanceResidual worst;
  for (int x = 0; x < P.rows(); ++x)
    for (int y = x + 1; y < P.cols(); ++y) {
      double d = std::abs(m(x) * P(x, y) - m(y) * P(y, x));
      if (d > worst.value) worst = {d, x, y};
    }
  return worst;
}

void require_reversible(const MarkovKernel& k, const Vec& m, double tol) {
  if (m.size() != k.size()) fail(ErrorCode::invalid_argument, "reversing measure has wrong length");
  BalanceResidual r = detailed_balance_residual(k.transition(), m);
  if (r.value > tol)
    fail(ErrorCode::tolerance, "detailed balance fails at (" + k.space().id(r.x) + "," + k.space().id(r.y) +
                                   "): residual " + std::to_string(r.value));
}

Vec markov_apply(const MarkovKernel& k, const Vec& f) {
  if (f.size() != k.size()) fail(ErrorCode::invalid_argument, "markov_apply: wrong length");
  return k.transition() * f;
}

CVec markov_apply(const MarkovKernel& k, const CVec& f) {
  if (f.size() != k.size()) fail(ErrorCode::invalid_argument, "markov_apply: wrong length");
  return k.transition() * f;
}

Vec dual_apply(const MarkovKernel& k, const Vec& mu) {
  if (mu.size() != k.size()) fail(ErrorCode::invalid_argument, "dual_apply: wrong length");
  return k.transition().transpose() * mu;
}

Mat edge_measure(const MarkovKernel& k, const Vec& m, const Tolerances& tol) {
  require_reversible(k, m, tol.detailed_balance);
  Mat mu = m.asDiagonal() * k.transition();
  // Symmetrize away the residual so downstream boundary/Dirichlet identities
  // see one consistent edge measure.
  mu = 0.5 * (mu + Mat(mu.transpose()));
  return mu;
}

double boundary_size(const MarkovKernel& k, const Vec& m, const AtomSet& a, const Tolerances& tol) {
  require_reversible(k, m, tol.detailed_balance);
  const int n = k.size();
  std::uint32_t inside = 0;
  if (n <= 32) inside = set_to_mask(a, n);
  double out = 0.0;
  int prev = -1;
  for (int x : a) {
    if (x <= prev || x >= n) fail(ErrorCode::invalid_argument, "boundary_size: bad atom set");
    prev = x;
    for (int y = 0; y < n; ++y) {
      bool in_a = n <= 32 ? (inside >> y & 1u) : std::binary_search(a.begin(), a.end(), y);
      if (!in_a) out += m(x) * k.transition()(x, y);
    }
  }
  return out;
}

double dirichlet_energy(const MarkovKernel& k, const Vec& m, const CVec& f, double p, const Tolerances& tol) {
  if (p < 1.0) fail(ErrorCode::invalid_argument, "dirichlet_energy: p must be >= 1");
  if (f.size() != k.size()) fail(ErrorCode::invalid_argument, "dirichlet_energy: wrong length");
  Mat mu = edge_measure(k, m, tol);
  double acc = 0.0;
  for (int x = 0; x < k.size(); ++x)
    for (int y = 0; y < k.size(); ++y) {
      double d = std::abs(f(x) - f(y));
      if (d == 0.0 || mu(x, y) == 0.0) continue;
      acc += std::pow(d, p) * mu(x, y);
    }
  return 0.5 * acc;
}

double dirichlet_energy(const MarkovKernel& k, const Vec& m, const Vec& f, double p, const Tolerances& tol) {
  return dirichlet_energy(k, m, CVec(f.cast<std::complex<double>>()), p, tol);
}

Mat symmetrized(const MarkovKernel& k, const Vec& m, const Tolerances& tol) {
  require_reversible(k, m, tol.detailed_balance);
  const int n = k.size();
  Mat M(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) M(x, y) = k.transition()(x, y) * std::sqrt(m(x) / m(y));
  // Exact symmetry for the eigensolver; entries agree up to the detailed
  // balance residual already.
  return 0.5 * (M + Mat(M.transpose()));
}

SpectralReport spectrum(const MarkovKernel& k, const Vec& m, const Tolerances& tol) {
  SpectralReport rep;
  const int n = k.size();
  if (n == 1) {
    rep.eigenvalues = Vec::Ones(1);
    rep.lambda2 = 0.0;
    rep.spectral_gap = 1.0;
    rep.one_eigenspace_dim = 1;
    rep.has_gap = true;
    return rep;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(k, m, tol));
  if (es.info() != Eigen::Success) fail(ErrorCode::invalid_argument, "spectrum: eigensolver failed");
  rep.eigenvalues = es.eigenvalues().reverse();
  rep.one_eigenspace_dim = 0;
  for (int i = 0; i < n; ++i)
    if (rep.eigenvalues(i) >= 1.0 - tol.eigen) ++rep.one_eigenspace_dim;
  rep.lambda2 = rep.one_eigenspace_dim > 1 ? 1.0 : rep.eigenvalues(1);
  rep.spectral_gap = 1.0 - rep.lambda2;
  rep.has_gap = rep.lambda2 < 1.0 - tol.eigen;
  return rep;
}

}  // namespace explab
