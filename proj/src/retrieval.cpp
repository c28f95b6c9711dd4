#include "docsray/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "docsray/error.hpp"
#include "docsray/simd/dot.hpp"
#include "docsray/text.hpp"

namespace docsray {
namespace {

void check_query(std::span<const double> query, const IndexedCorpus& corpus) {
  if (query.size() != corpus.dim())
    throw DimensionMismatch(fmt::format("query has {} components, index has {}", query.size(),
                                        corpus.dim()));
}

std::vector<ChunkHit> top_k(std::vector<ChunkHit> hits, std::size_t k, double min_score) {
  std::erase_if(hits, [&](const ChunkHit& h) { return !(h.score > min_score); });
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    hit_before);
  hits.resize(keep);
  return hits;
}

ChunkHit score_chunk(std::span<const double> query, const IndexedCorpus& corpus,
                     std::size_t position) {
  const auto& c = corpus.chunks[position];
  ChunkHit h;
  h.chunk_id = c.id;
  h.section_id = corpus.sections[c.section_index].section.id;
  h.section_index = c.section_index;
  h.chunk_index = c.chunk_index;
  h.chunk_position = position;
  h.score = simd::dot(query, corpus.chunk_embeddings.row(position));
  return h;
}

}  // namespace

std::string_view to_string(RetrievalMode mode) {
  return mode == RetrievalMode::flat ? "flat" : "hierarchical";
}

RetrievalMode parse_retrieval_mode(std::string_view s) {
  if (s == "hierarchical") return RetrievalMode::hierarchical;
  if (s == "flat") return RetrievalMode::flat;
  throw PreconditionError(fmt::format("unknown retrieval mode '{}'", s));
}

void RetrievalParams::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw PreconditionError("retrieval: beta must lie in [0, 1]");
  if (k1 < 1) throw PreconditionError("retrieval: k1 must be >= 1");
  if (k2 < 1) throw PreconditionError("retrieval: k2 must be >= 1");
}

double interpolate_scores(double cos_title, double cos_content, double beta) {
  return beta * cos_title + (1.0 - beta) * cos_content;
}

double score_section(std::span<const double> query, const IndexedCorpus& corpus,
                     std::size_t i, double beta) {
  check_query(query, corpus);
  const double t = simd::dot(query, corpus.title_embeddings.row(i));
  double c = t;
  if (!corpus.sections[i].content_from_title) {
    const double raw = simd::dot(query, corpus.content_embeddings.row(i));
    const double norm = i < corpus.content_norms.size() ? corpus.content_norms[i] : 0.0;
    c = norm > 0.0 ? raw / norm : 0.0;
  }
  return interpolate_scores(t, c, beta);
}

std::vector<SectionScore> coarse_search(std::span<const double> query, const IndexedCorpus& corpus,
                                        const RetrievalParams& params, RetrievalStats& stats) {
  params.validate();
  check_query(query, corpus);
  if (corpus.sections.empty()) throw PreconditionError("coarse search over an empty corpus");
  std::vector<SectionScore> scored;
  scored.reserve(corpus.sections.size());
  for (std::size_t i = 0; i < corpus.sections.size(); ++i)
    scored.push_back({i, score_section(query, corpus, i, params.beta)});
  stats.sections_scored += scored.size();
  stats.similarity_comparisons += scored.size();
  stats.dot_products += 2 * scored.size();

  const std::size_t keep = std::min(params.k1, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), [](const SectionScore& a, const SectionScore& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.section_index < b.section_index;
                    });
  scored.resize(keep);
  return scored;
}

std::vector<ChunkHit> fine_search(std::span<const double> query, const IndexedCorpus& corpus,
                                  std::span<const std::size_t> selected,
                                  const RetrievalParams& params, RetrievalStats& stats) {
  params.validate();
  check_query(query, corpus);
  std::vector<ChunkHit> hits;
  for (std::size_t s : selected) {
    if (s >= corpus.sections.size())
      throw PreconditionError(fmt::format("selected section {} does not exist", s));
    const auto& sec = corpus.sections[s];
    for (std::size_t j = 0; j < sec.chunk_count; ++j)
      hits.push_back(score_chunk(query, corpus, sec.chunk_begin + j));
    stats.chunks_scored += sec.chunk_count;
    stats.similarity_comparisons += sec.chunk_count;
    stats.dot_products += sec.chunk_count;
  }
  return top_k(std::move(hits), params.k2, params.min_score);
}

std::vector<ChunkHit> flat_search(std::span<const double> query, const IndexedCorpus& corpus,
                                  const RetrievalParams& params, RetrievalStats& stats) {
  params.validate();
  check_query(query, corpus);
  if (corpus.chunks.empty()) throw PreconditionError("flat search over an empty corpus");
  std::vector<ChunkHit> hits;
  hits.reserve(corpus.chunks.size());
  for (std::size_t p = 0; p < corpus.chunks.size(); ++p) hits.push_back(score_chunk(query, corpus, p));
  stats.chunks_scored += hits.size();
  stats.similarity_comparisons += hits.size();
  stats.dot_products += hits.size();
  return top_k(std::move(hits), params.k2, params.min_score);
}

bool hit_before(const ChunkHit& a, const ChunkHit& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.section_index != b.section_index) return a.section_index < b.section_index;
  return a.chunk_index < b.chunk_index;
}

std::vector<std::string> consulted_sections_of(const std::vector<ChunkHit>& hits) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& h : hits)
    if (seen.insert(h.section_id).second) out.push_back(h.section_id);
  return out;
}

RetrievalResult retrieve_embedding(std::span<const double> query, const IndexedCorpus& corpus,
                                   const RetrievalParams& params) {
  params.validate();
  check_query(query, corpus);
  RetrievalResult r;
  r.mode = params.mode;
  if (params.mode == RetrievalMode::flat) {
    r.hits = flat_search(query, corpus, params, r.stats);
  } else {
    r.selected_sections = coarse_search(query, corpus, params, r.stats);
    std::vector<std::size_t> selected;
    for (const auto& s : r.selected_sections) selected.push_back(s.section_index);
    // Visit selected sections in document order so that k1 >= S scores
    // chunks in exactly the order flat search does.
    std::sort(selected.begin(), selected.end());
    r.hits = fine_search(query, corpus, selected, params, r.stats);
  }
  r.consulted_sections = consulted_sections_of(r.hits);
  return r;
}

RetrievalResult retrieve(std::string_view query, const IndexedCorpus& corpus,
                         const RetrievalParams& params, const FusionConfig& fusion) {
  if (text::trim(query).empty()) throw PreconditionError("query is empty");
  params.validate();
  if (fusion.output_dim() != corpus.dim())
    throw DimensionMismatch(fmt::format("configured embedding space has {} dims, index has {}",
                                        fusion.output_dim(), corpus.dim()));
  const auto e = embed_text(query, fusion);
  return retrieve_embedding(e.values, corpus, params);
}

}  // namespace docsray
