#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docsray/providers.hpp"

namespace docsray {

enum class FusionMode { concat, add };

std::string_view to_string(FusionMode mode);
FusionMode parse_fusion_mode(std::string_view s);

// Unit-norm vector fused from two embedder outputs.
struct DualEmbedding {
  std::vector<double> values;
  FusionMode mode = FusionMode::concat;

  std::size_t dim() const { return values.size(); }
};

struct FusionConfig {
  FusionMode mode = FusionMode::concat;
  std::shared_ptr<const Embedder> backend_a;
  std::shared_ptr<const Embedder> backend_b;
  // L2-normalize each model's output before fusing. Off by default: only the
  // fused vector is normalized.
  bool prenormalize = false;

  // Throws PreconditionError if a backend is missing or add mode has unequal dims.
  void validate() const;
  std::size_t output_dim() const;
  // Stable description of the embedding space, stored in index headers.
  std::string fingerprint() const;
};

// concat: normalize(e1 || e2); add: normalize(e1 + e2).
// Throws DimensionMismatch (add mode, unequal dims) and PreconditionError
// (empty input, or a zero fused vector whose norm is undefined).
DualEmbedding fuse(std::span<const double> e1, std::span<const double> e2, FusionMode mode,
                   bool prenormalize = false);

// Dot product of two unit vectors, clamped to [-1, 1].
double cosine(const DualEmbedding& a, const DualEmbedding& b);

DualEmbedding embed_text(std::string_view text, const FusionConfig& config);

}  // namespace docsray
