#include "explab/random_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace explab {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(double lo, double hi, std::mt19937_64& rng) {
  if (!(lo < hi)) fail(ErrorCode::invalid_argument, "uniform_in: empty interval");
  return lo + (hi - lo) * uniform01(rng);
}

double standard_normal(std::mt19937_64& rng) {
  double u1 = 1.0 - uniform01(rng);  // keep the log argument positive
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

MarkovKernel random_reversible_kernel(int n, std::mt19937_64& rng) {
  if (n < 1) fail(ErrorCode::invalid_argument, "random_reversible_kernel: need at least one atom");
  Mat mu(n, n);
  for (int i = 0; i < n; ++i) {
    mu(i, i) = uniform_in(0.05, 1.0, rng);
    for (int j = i + 1; j < n; ++j) mu(i, j) = mu(j, i) = uniform_in(0.05, 1.0, rng);
  }
  Vec m = mu.rowwise().sum();
  Mat p(n, n);
  for (int i = 0; i < n; ++i) p.row(i) = mu.row(i) / m(i);

  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i));
  return MarkovKernel(FiniteMeasureSpace(std::move(ids), m), std::move(p), m);
}

FiniteAction random_weighted_action(int n, int pairs, std::mt19937_64& rng) {
  if (n < 1 || pairs < 1) fail(ErrorCode::invalid_argument, "random_weighted_action: need atoms and generators");
  Vec w(n);
  for (int i = 0; i < n; ++i) w(i) = uniform_in(0.5, 2.0, rng);
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i));
  FiniteMeasureSpace space(std::move(ids), w);

  std::vector<std::string> symbols{"e"};
  std::vector<int> inverse{0}, lengths{0};
  std::vector<std::vector<int>> perms;
  std::vector<int> id_perm(n);
  std::iota(id_perm.begin(), id_perm.end(), 0);
  perms.push_back(id_perm);

  for (int g = 0; g < pairs; ++g) {
    std::vector<int> p = id_perm;
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(p[i], p[j]);
    }
    std::vector<int> q(n);
    for (int i = 0; i < n; ++i) q[p[i]] = i;
    std::string name = "g" + std::to_string(g + 1);
    symbols.push_back(name);
    symbols.push_back(name + "-");
    int base = static_cast<int>(perms.size());
    inverse.push_back(base + 1);
    inverse.push_back(base);
    lengths.push_back(1);
    lengths.push_back(1);
    perms.push_back(std::move(p));
    perms.push_back(std::move(q));
  }
  return FiniteAction(std::move(space), GeneratorSet(std::move(symbols), std::move(inverse), std::move(lengths)),
                      std::move(perms));
}

AtomSet random_nonempty_subset(int n, std::mt19937_64& rng) {
  if (n < 1) fail(ErrorCode::invalid_argument, "random_nonempty_subset: empty space");
  AtomSet out;
  while (out.empty()) {
    for (int i = 0; i < n; ++i)
      if (uniform01(rng) < 0.5) out.push_back(i);
  }
  return out;
}

Vec random_vector(int n, std::mt19937_64& rng) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = standard_normal(rng);
  return v;
}

}  // namespace explab
