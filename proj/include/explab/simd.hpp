#pragma once

#include <cstdint>
#include <cstddef>

// Hot inner loops behind a runtime-dispatched function table. Subset scans
// (Cheeger and vertex-expansion enumeration) spend their time in masked row
// sums; warped-metric construction spends its time in min-plus row updates.
// Scalar implementations are the reference; the AVX2 variants must agree with
// them up to summation order and are equivalence-tested on random inputs.
namespace explab::simd {

// sum over set bits i of mask: v[i]; bits past n must be clear.
using MaskedDotFn = double (*)(const double* v, std::uint32_t mask, int n);

// dst[j] = min(dst[j], add + src[j]) for j in [0, n).
using MinPlusFn = void (*)(double* dst, const double* src, double add, int n);

struct Ops {
  MaskedDotFn masked_dot;
  MinPlusFn min_plus;
  const char* name;
};

// Table picked once per process: AVX2 when the CPU has it, scalar otherwise.
const Ops& ops();

namespace detail {
double masked_dot_scalar(const double* v, std::uint32_t mask, int n);
void min_plus_scalar(double* dst, const double* src, double add, int n);
#if defined(__x86_64__) || defined(_M_X64)
double masked_dot_avx2(const double* v, std::uint32_t mask, int n);
void min_plus_avx2(double* dst, const double* src, double add, int n);
bool cpu_has_avx2();
#endif
}  // namespace detail

}  // namespace explab::simd
