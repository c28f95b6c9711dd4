#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "docsray/error.hpp"
#include "docsray/simd/dot.hpp"
#include "support/oracles.hpp"

using namespace docsray;

namespace {

// Restores the dispatch choice after each test.
struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::set_active_isa(saved); }
};

double tolerance(const std::vector<double>& a, std::size_t n) {
  double mag = 0;
  for (double x : a) mag += std::fabs(x);
  return 1e-14 * (mag + 1.0) * static_cast<double>(n + 1);
}

}  // namespace

TEST(Simd, ScalarIsAlwaysAvailable) {
  EXPECT_TRUE(simd::is_supported(simd::Isa::scalar));
  EXPECT_TRUE(simd::is_supported(simd::active_isa()));
  EXPECT_EQ(simd::to_string(simd::Isa::avx2), "avx2");
}

TEST(Simd, ScalarMatchesLongDoubleOracle) {
  std::mt19937 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 7u, 64u, 129u, 1000u}) {
    const auto a = oracle::random_vector(rng, n);
    const auto b = oracle::random_vector(rng, n);
    EXPECT_NEAR(simd::scalar::dot_f64(a.data(), b.data(), n), oracle::dot(a, b), tolerance(a, n));
    std::vector<float> f(b.begin(), b.end());
    EXPECT_NEAR(simd::scalar::dot_f64_f32(a.data(), f.data(), n), oracle::dot_row(a, f),
                tolerance(a, n));
  }
}

TEST(Simd, EveryCompiledVariantAgreesWithScalar) {
  IsaGuard guard;
  std::mt19937 rng(2);
  for (auto isa : {simd::Isa::avx2, simd::Isa::neon}) {
    if (!simd::is_supported(isa)) {
      EXPECT_THROW(simd::set_active_isa(isa), PreconditionError);
      continue;
    }
    simd::set_active_isa(isa);
    // Odd lengths exercise the remainder loops.
    for (std::size_t n = 0; n < 70; ++n) {
      const auto a = oracle::random_vector(rng, n);
      const auto b = oracle::random_vector(rng, n);
      std::vector<float> f(b.begin(), b.end());
      const double tol = tolerance(a, n);
      EXPECT_NEAR(simd::dot(a, b), simd::scalar::dot_f64(a.data(), b.data(), n), tol) << n;
      EXPECT_NEAR(simd::dot(a, std::span<const float>(f)),
                  simd::scalar::dot_f64_f32(a.data(), f.data(), n), tol)
          << n;
    }
  }
}

TEST(Simd, DispatchRejectsLengthMismatch) {
  std::vector<double> a(3), b(4);
  EXPECT_THROW(simd::dot(a, b), DimensionMismatch);
}
