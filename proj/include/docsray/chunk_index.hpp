#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docsray/corpus.hpp"
#include "docsray/fusion.hpp"
#include "docsray/pseudo_toc.hpp"

namespace docsray {

struct ChunkingParams {
  std::size_t window_tokens = 550;
  std::size_t overlap_tokens = 25;
  std::size_t min_tail_tokens = 50;

  void validate() const;
  std::size_t stride() const { return window_tokens - overlap_tokens; }
  std::string fingerprint() const;
};

// [token_start, token_end) plus the matching byte range in the section text.
struct ChunkSpan {
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  std::size_t byte_begin = 0;
  std::size_t byte_end = 0;

  std::size_t tokens() const { return token_end - token_start; }
};

// Window starts at multiples of stride; the last window is clipped at the end
// of the text, and a clipped tail shorter than min_tail_tokens is folded into
// the previous chunk.
std::vector<std::pair<std::size_t, std::size_t>> window_spans(std::size_t token_count,
                                                              const ChunkingParams& params);

std::vector<ChunkSpan> chunk_section(std::string_view section_text, const ChunkingParams& params,
                                     const Tokenizer& tokenizer);

struct SectionRepresentation {
  DualEmbedding title;
  std::vector<double> content;  // mean of chunk embeddings, not re-normalized
  bool content_from_title = false;
};

// With no chunks the content vector is the title embedding.
SectionRepresentation compute_section_representation(
    std::string_view title, std::span<const std::vector<double>> chunk_embeddings,
    const FusionConfig& fusion);

std::vector<double> mean_of(std::span<const std::vector<double>> rows);

// Row-major float32 matrix.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  explicit EmbeddingMatrix(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return dim_ ? data_.size() / dim_ : 0; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::vector<double> row_f64(std::size_t i) const;
  void append(std::span<const double> v);
  void append(std::span<const float> v);

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

struct IndexedSection {
  Section section;
  std::string text;
  std::size_t chunk_begin = 0;
  std::size_t chunk_count = 0;
  bool content_from_title = false;

  bool operator==(const IndexedSection&) const = default;
};

struct IndexedChunk {
  std::string id;
  std::size_t section_index = 0;
  std::size_t chunk_index = 0;  // within its section
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  std::string text;

  bool operator==(const IndexedChunk&) const = default;
};

struct IndexFingerprints {
  std::string tokenizer;
  std::string fusion;
  std::string chunking;

  bool operator==(const IndexFingerprints&) const = default;
};

IndexFingerprints current_fingerprints(const Tokenizer& tokenizer, const FusionConfig& fusion,
                                       const ChunkingParams& chunking);

struct IndexedCorpus {
  std::string doc_id;
  SourceKind source_kind = SourceKind::plain_text;
  std::size_t page_count = 0;
  std::string toc_generator;
  std::vector<IndexedSection> sections;
  std::vector<IndexedChunk> chunks;
  EmbeddingMatrix title_embeddings;
  EmbeddingMatrix content_embeddings;
  EmbeddingMatrix chunk_embeddings;
  IndexFingerprints fingerprints;
  // Derived; recomputed by refresh_derived(), never persisted.
  std::vector<double> content_norms;

  std::size_t dim() const { return chunk_embeddings.dim(); }
  std::size_t total_chunks() const { return chunks.size(); }      // N
  std::size_t section_count() const { return sections.size(); }  // S
  std::vector<std::size_t> chunks_per_section() const;           // N_s

  void refresh_derived();
  // Throws IndexFormatError when counts, references, dims or content means disagree.
  void validate() const;

  bool operator==(const IndexedCorpus& other) const;
};

// Fails without writing anything if any embedding call fails, or if the
// document yields no chunks at all.
IndexedCorpus build_index(const Document& doc, const PseudoToc& toc, const ChunkingParams& params,
                          const FusionConfig& fusion, const Tokenizer& tokenizer);

inline constexpr int kIndexFormatVersion = 1;

std::string serialize_index(const IndexedCorpus& corpus);
IndexedCorpus deserialize_index(std::string_view bytes);

void save_index(const IndexedCorpus& corpus, const std::filesystem::path& path);

struct LoadedIndex {
  IndexedCorpus corpus;
  std::vector<std::string> warnings;
};

// `expected` fingerprints that differ from the file's produce warnings, not errors.
LoadedIndex load_index(const std::filesystem::path& path,
                       const std::optional<IndexFingerprints>& expected = std::nullopt);

std::string default_index_path(std::string_view doc_id);

}  // namespace docsray
