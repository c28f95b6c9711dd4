#include <atomic>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "docsray/error.hpp"
#include "docsray/simd/dot.hpp"

namespace docsray::simd {
namespace {

using DotF64 = double (*)(const double*, const double*, std::size_t);
using DotMixed = double (*)(const double*, const float*, std::size_t);

struct Kernels {
  Isa isa;
  DotF64 f64;
  DotMixed mixed;
};

constexpr Kernels kScalar{Isa::scalar, &scalar::dot_f64, &scalar::dot_f64_f32};
#if defined(DOCSRAY_HAVE_AVX2)
constexpr Kernels kAvx2{Isa::avx2, &avx2::dot_f64, &avx2::dot_f64_f32};
#endif
#if defined(DOCSRAY_HAVE_NEON)
constexpr Kernels kNeon{Isa::neon, &neon::dot_f64, &neon::dot_f64_f32};
#endif

const Kernels* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar: return &kScalar;
    case Isa::avx2:
#if defined(DOCSRAY_HAVE_AVX2)
      return &kAvx2;
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(DOCSRAY_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(DOCSRAY_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(DOCSRAY_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Kernels* initial_kernels() {
  if (const char* env = std::getenv("DOCSRAY_SIMD"); env && *env) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == to_string(isa) && is_supported(isa)) return kernels_for(isa);
    }
  }
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (is_supported(isa)) return kernels_for(isa);
  }
  return &kScalar;
}

std::atomic<const Kernels*>& active() {
  static std::atomic<const Kernels*> k{initial_kernels()};
  return k;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool is_supported(Isa isa) { return kernels_for(isa) != nullptr && cpu_has(isa); }

Isa active_isa() { return active().load(std::memory_order_relaxed)->isa; }

void set_active_isa(Isa isa) {
  if (!is_supported(isa))
    throw PreconditionError(fmt::format("SIMD variant '{}' is not available", to_string(isa)));
  active().store(kernels_for(isa), std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DimensionMismatch(fmt::format("dot: lengths {} and {} differ", a.size(), b.size()));
  return active().load(std::memory_order_relaxed)->f64(a.data(), b.data(), a.size());
}

double dot(std::span<const double> query, std::span<const float> row) {
  if (query.size() != row.size())
    throw DimensionMismatch(
        fmt::format("dot: lengths {} and {} differ", query.size(), row.size()));
  return active().load(std::memory_order_relaxed)->mixed(query.data(), row.data(), query.size());
}

}  // namespace docsray::simd
