#include "explab/simd.hpp"

namespace explab::simd {

const Ops& ops() {
  static const Ops table = [] {
#if defined(__x86_64__) || defined(_M_X64)
    if (detail::cpu_has_avx2())
      return Ops{detail::masked_dot_avx2, detail::min_plus_avx2, "avx2"};
#endif
    return Ops{detail::masked_dot_scalar, detail::min_plus_scalar, "scalar"};
  }();
  return table;
}

}  // namespace explab::simd
