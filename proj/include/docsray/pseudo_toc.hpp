#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "docsray/corpus.hpp"
#include "docsray/fusion.hpp"
#include "docsray/providers.hpp"

namespace docsray {

struct SegmentationParams {
  std::size_t initial_chunk_pages = 5;  // k
  std::size_t min_pages = 3;            // m
  std::size_t max_pages = 15;           // M; recorded but not enforced
  std::size_t excerpt_chars = 500;
  std::size_t title_sample_chars = 1500;

  void validate() const;
};

// Sorted page indices where sections start; always contains 0.
struct BoundarySet {
  std::vector<std::size_t> boundaries{0};
};

struct SegmentationResult {
  BoundarySet boundaries;
  std::size_t llm_calls = 0;
  std::vector<std::string> warnings;
};

// Phase 1. Pages are grouped in chunks of k; for each adjacent pair the LLM
// sees the last excerpt_chars of the earlier chunk and the first excerpt_chars
// of the later one, and a "1" reply starts a section at the later chunk.
// Anything other than "0"/"1" counts as "0" with a warning.
SegmentationResult initial_segmentation(const Document& doc, const SegmentationParams& params,
                                        const LlmBackend& llm);

std::vector<Section> sections_from_boundaries(const Document& doc, const BoundarySet& boundaries);

// Phase 2. Repeatedly merges the leftmost section shorter than m pages into
// the neighbour whose full-text embedding is more similar (previous wins only
// on strictly greater similarity) until none is left or one section remains.
std::vector<Section> merge_small_sections(const Document& doc, std::vector<Section> sections,
                                          const SegmentationParams& params,
                                          const FusionConfig& fusion);

struct TitleResult {
  std::vector<Section> sections;
  std::vector<std::string> warnings;
};

// Phase 3. Titles from the first title_sample_chars of each section.
TitleResult generate_titles(const Document& doc, std::vector<Section> sections,
                            const LlmBackend& llm, const SegmentationParams& params = {});

std::string fallback_title(const Section& section);

struct PseudoToc {
  std::string doc_id;
  std::size_t page_count = 0;
  std::vector<Section> sections;
  SegmentationParams params;
  std::string llm_id;
  std::chrono::system_clock::time_point generated_at;
  std::vector<std::string> warnings;
};

PseudoToc build_pseudo_toc(const Document& doc, const SegmentationParams& params,
                           const LlmBackend& llm, const FusionConfig& fusion);

// Ordered records {section_id, title, page_start, page_end} as JSON.
std::string export_toc_json(const PseudoToc& toc);

// Human-readable table, pages 1-based.
std::string format_toc_table(const std::vector<Section>& sections);

}  // namespace docsray
