#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dot-product kernels behind similarity scoring. Every ISA variant computes
// the same sum in double precision; only the accumulation order differs, so
// variants agree to a few ulps and are equivalence-tested against scalar.
namespace docsray::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

// True if the variant was compiled in and the running CPU supports it.
bool is_supported(Isa isa);

// Best supported variant. DOCSRAY_SIMD=scalar|avx2|neon overrides it at startup.
Isa active_isa();

// Throws PreconditionError for unsupported variants. Intended for tests and benchmarks.
void set_active_isa(Isa isa);

// Dispatched through the active variant. Spans must have equal length.
double dot(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> query, std::span<const float> row);

namespace scalar {
double dot_f64(const double* a, const double* b, std::size_t n);
double dot_f64_f32(const double* q, const float* v, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot_f64(const double* a, const double* b, std::size_t n);
double dot_f64_f32(const double* q, const float* v, std::size_t n);
}  // namespace avx2

namespace neon {
double dot_f64(const double* a, const double* b, std::size_t n);
double dot_f64_f32(const double* q, const float* v, std::size_t n);
}  // namespace neon

}  // namespace docsray::simd
