#include "docsray/simd/dot.hpp"

namespace docsray::simd::scalar {

double dot_f64(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double dot_f64_f32(const double* q, const float* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += q[i] * static_cast<double>(v[i]);
  return acc;
}

}  // namespace docsray::simd::scalar
