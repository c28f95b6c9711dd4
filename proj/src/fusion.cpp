#include "docsray/fusion.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "docsray/error.hpp"
#include "docsray/simd/dot.hpp"

namespace docsray {
namespace {

double l2(std::span<const double> v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss);
}

std::vector<double> scaled_copy(std::span<const double> v, bool normalize) {
  std::vector<double> out(v.begin(), v.end());
  if (normalize) {
    const double n = l2(v);
    if (n > 0.0)
      for (double& x : out) x /= n;
  }
  return out;
}

}  // namespace

std::string_view to_string(FusionMode mode) { return mode == FusionMode::concat ? "concat" : "add"; }

FusionMode parse_fusion_mode(std::string_view s) {
  if (s == "concat") return FusionMode::concat;
  if (s == "add") return FusionMode::add;
  throw ParseError(fmt::format("unknown fusion mode '{}'", s));
}

void FusionConfig::validate() const {
  if (!backend_a || !backend_b) throw PreconditionError("fusion needs two embedder backends");
  if (mode == FusionMode::add && backend_a->dim() != backend_b->dim())
    throw PreconditionError(fmt::format("add fusion requires equal dims, got {} and {}",
                                        backend_a->dim(), backend_b->dim()));
}

std::size_t FusionConfig::output_dim() const {
  validate();
  return mode == FusionMode::concat ? backend_a->dim() + backend_b->dim() : backend_a->dim();
}

std::string FusionConfig::fingerprint() const {
  validate();
  return fmt::format("{}|{}|{}{}", to_string(mode), backend_a->id(), backend_b->id(),
                     prenormalize ? "|prenorm" : "");
}

DualEmbedding fuse(std::span<const double> e1, std::span<const double> e2, FusionMode mode,
                   bool prenormalize) {
  if (e1.empty() || e2.empty()) throw PreconditionError("fuse: empty source vector");
  auto a = scaled_copy(e1, prenormalize);
  auto b = scaled_copy(e2, prenormalize);

  DualEmbedding out;
  out.mode = mode;
  if (mode == FusionMode::concat) {
    out.values = std::move(a);
    out.values.insert(out.values.end(), b.begin(), b.end());
  } else {
    if (a.size() != b.size())
      throw DimensionMismatch(
          fmt::format("add fusion requires equal dims, got {} and {}", a.size(), b.size()));
    out.values.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a[i] + b[i];
  }
  const double n = l2(out.values);
  if (!(n > 0.0) || !std::isfinite(n))
    throw PreconditionError("fuse: fused vector has zero or non-finite norm");
  for (double& x : out.values) x /= n;
  return out;
}

double cosine(const DualEmbedding& a, const DualEmbedding& b) {
  if (a.mode != b.mode)
    throw DimensionMismatch("cosine: embeddings were fused with different modes");
  if (a.dim() != b.dim())
    throw DimensionMismatch(fmt::format("cosine: dims {} and {} differ", a.dim(), b.dim()));
  return std::clamp(simd::dot(a.values, b.values), -1.0, 1.0);
}

DualEmbedding embed_text(std::string_view text, const FusionConfig& config) {
  config.validate();
  const auto e1 = embed_raw(*config.backend_a, text);
  const auto e2 = embed_raw(*config.backend_b, text);
  return fuse(e1, e2, config.mode, config.prenormalize);
}

}  // namespace docsray
