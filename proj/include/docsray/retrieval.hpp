#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docsray/chunk_index.hpp"
#include "docsray/fusion.hpp"

namespace docsray {

enum class RetrievalMode { hierarchical, flat };

std::string_view to_string(RetrievalMode mode);
RetrievalMode parse_retrieval_mode(std::string_view s);

struct RetrievalParams {
  double beta = 0.3;
  std::size_t k1 = 5;
  std::size_t k2 = 10;
  RetrievalMode mode = RetrievalMode::hierarchical;
  // Hits must score strictly above this. A query that shares nothing with the
  // document (cosine 0 everywhere) then yields no hits at all.
  double min_score = 0.0;

  void validate() const;
};

struct RetrievalStats {
  std::size_t similarity_comparisons = 0;  // S + sum of selected N_s, or N when flat
  std::size_t sections_scored = 0;
  std::size_t chunks_scored = 0;
  std::size_t dot_products = 0;  // raw kernel calls: 2 per section, 1 per chunk
};

struct ChunkHit {
  std::string chunk_id;
  std::string section_id;
  std::size_t section_index = 0;
  std::size_t chunk_index = 0;  // within the section
  std::size_t chunk_position = 0;  // row in the corpus chunk matrix
  double score = 0.0;
};

struct SectionScore {
  std::size_t section_index = 0;
  double score = 0.0;
};

struct RetrievalResult {
  std::vector<ChunkHit> hits;
  std::vector<std::string> consulted_sections;
  std::vector<SectionScore> selected_sections;  // empty in flat mode
  RetrievalStats stats;
  RetrievalMode mode = RetrievalMode::hierarchical;
};

// beta * cos_title + (1 - beta) * cos_content.
double interpolate_scores(double cos_title, double cos_content, double beta);

// Section score for a unit query vector. The content term divides the dot
// product by the mean vector's norm; sections without chunks reuse the title term.
double score_section(std::span<const double> query, const IndexedCorpus& corpus,
                     std::size_t section_index, double beta);

// Top-k1 sections, best first, ties by section order.
std::vector<SectionScore> coarse_search(std::span<const double> query, const IndexedCorpus& corpus,
                                        const RetrievalParams& params, RetrievalStats& stats);

// Scores the chunks of `selected` only and returns the top k2.
std::vector<ChunkHit> fine_search(std::span<const double> query, const IndexedCorpus& corpus,
                                  std::span<const std::size_t> selected,
                                  const RetrievalParams& params, RetrievalStats& stats);

std::vector<ChunkHit> flat_search(std::span<const double> query, const IndexedCorpus& corpus,
                                  const RetrievalParams& params, RetrievalStats& stats);

// Ranking order: score descending, then section index, then chunk index.
bool hit_before(const ChunkHit& a, const ChunkHit& b);

std::vector<std::string> consulted_sections_of(const std::vector<ChunkHit>& hits);

RetrievalResult retrieve_embedding(std::span<const double> query, const IndexedCorpus& corpus,
                                   const RetrievalParams& params);

// Throws PreconditionError on an empty query and DimensionMismatch if the
// configured embedding space does not match the index.
RetrievalResult retrieve(std::string_view query, const IndexedCorpus& corpus,
                         const RetrievalParams& params, const FusionConfig& fusion);

}  // namespace docsray
