#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "docsray/error.hpp"
#include "docsray/fusion.hpp"
#include "support/oracles.hpp"

using namespace docsray;

TEST(Fusion, ConcatAndAddMatchOracle) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_vector(rng, 24, 3.0);
    const auto b = oracle::random_vector(rng, 24, 0.2);
    for (bool concat : {true, false}) {
      const auto got = fuse(a, b, concat ? FusionMode::concat : FusionMode::add);
      const auto want = oracle::fuse(a, b, concat);
      ASSERT_EQ(got.dim(), want.size());
      for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got.values[i], want[i], 1e-9);
      EXPECT_NEAR(oracle::norm(got.values), 1.0, 1e-6);
    }
  }
}

TEST(Fusion, ConcatDimensionIsTheSum) {
  const std::vector<double> a(1024, 1.0), b(768, 2.0);
  EXPECT_EQ(fuse(a, b, FusionMode::concat).dim(), 1792u);
  EXPECT_EQ(fixtures::mock_fusion(1024, 768).output_dim(), 1792u);
}

TEST(Fusion, AddModeRejectsUnequalDims) {
  const std::vector<double> a(4, 1.0), b(5, 1.0);
  EXPECT_THROW(fuse(a, b, FusionMode::add), DimensionMismatch);
  EXPECT_THROW(fixtures::mock_fusion(4, 5, FusionMode::add).validate(), PreconditionError);
}

TEST(Fusion, ZeroOrEmptyInputsAreRejected) {
  const std::vector<double> z(3, 0.0), e;
  EXPECT_THROW(fuse(z, z, FusionMode::concat), PreconditionError);
  EXPECT_THROW(fuse(e, z, FusionMode::concat), PreconditionError);
  // Opposite vectors cancel under addition.
  const std::vector<double> a{1, 2}, b{-1, -2};
  EXPECT_THROW(fuse(a, b, FusionMode::add), PreconditionError);
}

TEST(Fusion, ScalingBothInputsChangesNothing) {
  std::mt19937 rng(4);
  const auto a = oracle::random_vector(rng, 10);
  const auto b = oracle::random_vector(rng, 10);
  auto a7 = a, b7 = b;
  for (auto& x : a7) x *= 7.0;
  for (auto& x : b7) x *= 7.0;
  const auto f1 = fuse(a, b, FusionMode::concat);
  const auto f2 = fuse(a7, b7, FusionMode::concat);
  for (std::size_t i = 0; i < f1.dim(); ++i) EXPECT_NEAR(f1.values[i], f2.values[i], 1e-12);
}

TEST(Fusion, PrenormalizeEqualizesModelWeight) {
  // Without prenormalization the larger-magnitude model dominates.
  const std::vector<double> a{100, 0}, b{0, 1};
  const auto raw = fuse(a, b, FusionMode::concat);
  const auto pre = fuse(a, b, FusionMode::concat, true);
  EXPECT_GT(raw.values[0], 0.99);
  EXPECT_NEAR(pre.values[0], std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(pre.values[3], std::sqrt(0.5), 1e-12);
}

TEST(Cosine, PropertiesOnUnitVectors) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = fuse(oracle::random_vector(rng, 8), oracle::random_vector(rng, 8), FusionMode::concat);
    const auto y = fuse(oracle::random_vector(rng, 8), oracle::random_vector(rng, 8), FusionMode::concat);
    EXPECT_NEAR(cosine(x, x), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(cosine(x, y), cosine(y, x));
    EXPECT_LE(std::fabs(cosine(x, y)), 1.0);
    EXPECT_NEAR(cosine(x, y), oracle::dot(x.values, y.values), 1e-12);
  }
}

TEST(EmbedText, UsesBothBackendsAndIsDeterministic) {
  const auto f = fixtures::mock_fusion(16, 8);
  const auto e = embed_text("revenue grew in asia", f);
  EXPECT_EQ(e.dim(), 24u);
  EXPECT_NEAR(oracle::norm(e.values), 1.0, 1e-12);
  const auto want = oracle::fuse(f.backend_a->embed_raw("revenue grew in asia"),
                                 f.backend_b->embed_raw("revenue grew in asia"), true);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(e.values[i], want[i], 1e-9);
  EXPECT_EQ(embed_text("revenue grew in asia", f).values, e.values);
  EXPECT_THROW(embed_text("   ", f), PreconditionError);
}

TEST(EmbedText, FingerprintNamesModeAndModels) {
  auto f = fixtures::mock_fusion(16, 8);
  EXPECT_EQ(f.fingerprint(), "concat|mock:mock-a:16|mock:mock-b:8");
  f.prenormalize = true;
  EXPECT_EQ(f.fingerprint(), "concat|mock:mock-a:16|mock:mock-b:8|prenorm");
  EXPECT_EQ(parse_fusion_mode("add"), FusionMode::add);
  EXPECT_THROW(parse_fusion_mode("mean"), ParseError);
}
