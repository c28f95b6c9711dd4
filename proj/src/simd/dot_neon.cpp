// AArch64 only; NEON is baseline there so no runtime check is needed.
#include <arm_neon.h>

#include "docsray/simd/dot.hpp"

namespace docsray::simd::neon {

double dot_f64(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double dot_f64_f32(const double* q, const float* v, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t f = vld1q_f32(v + i);
    acc0 = vfmaq_f64(acc0, vld1q_f64(q + i), vcvt_f64_f32(vget_low_f32(f)));
    acc1 = vfmaq_f64(acc1, vld1q_f64(q + i + 2), vcvt_high_f64_f32(f));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += q[i] * static_cast<double>(v[i]);
  return acc;
}

}  // namespace docsray::simd::neon
