#include "explab/simd.hpp"

namespace explab::simd::detail {

double masked_dot_scalar(const double* v, std::uint32_t mask, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    if (mask >> i & 1u) acc += v[i];
  return acc;
}

void min_plus_scalar(double* dst, const double* src, double add, int n) {
  for (int j = 0; j < n; ++j) {
    double cand = add + src[j];
    if (cand < dst[j]) dst[j] = cand;
  }
}

}  // namespace explab::simd::detail
