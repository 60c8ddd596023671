#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "explab/simd.hpp"

namespace explab::simd::detail {

bool cpu_has_avx2() { return __builtin_cpu_supports("avx2") != 0; }

namespace {
// Per-nibble lane masks for maskload: bit i set -> lane i passes.
alignas(32) constexpr long long kLane[16][4] = {
    {0, 0, 0, 0},    {-1, 0, 0, 0},   {0, -1, 0, 0},   {-1, -1, 0, 0},
    {0, 0, -1, 0},   {-1, 0, -1, 0},  {0, -1, -1, 0},  {-1, -1, -1, 0},
    {0, 0, 0, -1},   {-1, 0, 0, -1},  {0, -1, 0, -1},  {-1, -1, 0, -1},
    {0, 0, -1, -1},  {-1, 0, -1, -1}, {0, -1, -1, -1}, {-1, -1, -1, -1},
};
}  // namespace

__attribute__((target("avx2"))) double masked_dot_avx2(const double* v, std::uint32_t mask, int n) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    std::uint32_t nib = (mask >> i) & 0xFu;
    if (!nib) continue;
    __m256i lane = _mm256_load_si256(reinterpret_cast<const __m256i*>(kLane[nib]));
    acc = _mm256_add_pd(acc, _mm256_maskload_pd(v + i, lane));
  }
  alignas(32) double part[4];
  _mm256_store_pd(part, acc);
  double out = (part[0] + part[1]) + (part[2] + part[3]);
  for (; i < n; ++i)
    if (mask >> i & 1u) out += v[i];
  return out;
}

__attribute__((target("avx2"))) void min_plus_avx2(double* dst, const double* src, double add, int n) {
  __m256d vadd = _mm256_set1_pd(add);
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d cand = _mm256_add_pd(vadd, _mm256_loadu_pd(src + j));
    __m256d cur = _mm256_loadu_pd(dst + j);
    _mm256_storeu_pd(dst + j, _mm256_min_pd(cur, cand));
  }
  for (; j < n; ++j) {
    double cand = add + src[j];
    if (cand < dst[j]) dst[j] = cand;
  }
}

}  // namespace explab::simd::detail

#endif
