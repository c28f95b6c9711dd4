#pragma once

// Independent re-computations used as test oracles, plus fixture builders.
// Nothing here calls the code under test for the value being checked.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "docsray/chunk_index.hpp"
#include "docsray/config.hpp"
#include "docsray/engine.hpp"
#include "docsray/fusion.hpp"
#include "docsray/providers.hpp"
#include "docsray/pseudo_toc.hpp"

namespace oracle {

inline std::size_t whitespace_count(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}

// Window k reaches the end iff k*stride + window >= T, so the count is the
// first such k plus one; the tail rule then folds a short last window.
inline std::vector<std::pair<std::size_t, std::size_t>> windows(std::size_t T, std::size_t window,
                                                                std::size_t overlap,
                                                                std::size_t min_tail) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (T == 0) return out;
  const std::size_t stride = window - overlap;
  const std::size_t n = T <= window ? 1 : (T - window + stride - 1) / stride + 1;
  for (std::size_t k = 0; k < n; ++k) out.emplace_back(k * stride, std::min(T, k * stride + window));
  if (n > 1 && T - (n - 1) * stride < min_tail) {
    out.pop_back();
    out.back().second = T;
  }
  return out;
}

inline std::vector<double> fuse(const std::vector<double>& a, const std::vector<double>& b,
                                bool concat) {
  std::vector<long double> v;
  if (concat) {
    for (double x : a) v.push_back(x);
    for (double x : b) v.push_back(x);
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) v.push_back(static_cast<long double>(a[i]) + b[i]);
  }
  long double ss = 0;
  for (auto x : v) ss += x * x;
  const long double n = std::sqrt(ss);
  std::vector<double> out;
  for (auto x : v) out.push_back(static_cast<double>(x / n));
  return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> random_vector(std::mt19937& rng, std::size_t dim, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(dim);
  for (auto& x : v) x = g(rng);
  return v;
}

inline std::vector<double> unit(std::vector<double> v) {
  const double n = norm(v);
  for (auto& x : v) x /= n;
  return v;
}

// Brute-force ranking over (section, chunk, score): full sort, same declared order.
struct Scored {
  std::size_t section;
  std::size_t chunk;
  double score;
};

inline std::vector<Scored> rank(std::vector<Scored> all, std::size_t k) {
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.section != b.section) return a.section < b.section;
    return a.chunk < b.chunk;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

inline double dot_row(const std::vector<double>& q, std::span<const float> row) {
  long double s = 0;
  for (std::size_t i = 0; i < q.size(); ++i) s += static_cast<long double>(q[i]) * row[i];
  return static_cast<double>(s);
}

}  // namespace oracle

namespace fixtures {

inline docsray::FusionConfig mock_fusion(std::size_t da = 32, std::size_t db = 32,
                                         docsray::FusionMode mode = docsray::FusionMode::concat) {
  docsray::FusionConfig f;
  f.mode = mode;
  f.backend_a = std::make_shared<docsray::MockEmbedder>("mock-a", da);
  f.backend_b = std::make_shared<docsray::MockEmbedder>("mock-b", db);
  return f;
}

// Document whose pages are given; doc id "doc".
inline docsray::Document doc_of(const std::vector<std::string>& pages, std::string id = "doc") {
  docsray::Document d;
  d.doc_id = std::move(id);
  for (std::size_t i = 0; i < pages.size(); ++i) d.pages.push_back({i, pages[i], {}, false});
  return d;
}

// TOC with the given titles and inclusive page ranges.
inline docsray::PseudoToc toc_of(const docsray::Document& doc,
                                 const std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>& secs) {
  docsray::PseudoToc t;
  t.doc_id = doc.doc_id;
  t.page_count = doc.pages.size();
  t.llm_id = "fixture";
  for (std::size_t i = 0; i < secs.size(); ++i) {
    docsray::Section s;
    s.index = i;
    s.id = docsray::make_section_id(doc.doc_id, i);
    s.title = secs[i].first;
    s.page_start = secs[i].second.first;
    s.page_end = secs[i].second.second;
    t.sections.push_back(std::move(s));
  }
  return t;
}

// n space-separated words drawn from a small vocabulary, so chunks collide often.
inline std::string words(std::mt19937& rng, std::size_t n, std::size_t vocab, const std::string& prefix = "w") {
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += prefix + std::to_string(pick(rng));
  }
  return out;
}

// Index with chunks_per_section[i] chunks in section i (one page per section),
// built through the real pipeline with small windows.
inline docsray::IndexedCorpus random_corpus(std::mt19937& rng,
                                            const std::vector<std::size_t>& chunks_per_section,
                                            const docsray::FusionConfig& fusion,
                                            const docsray::ChunkingParams& chunking,
                                            std::size_t vocab = 30) {
  std::vector<std::string> pages;
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> secs;
  for (std::size_t i = 0; i < chunks_per_section.size(); ++i) {
    const auto tokens = docsray::synthetic_section_tokens(chunks_per_section[i], chunking);
    pages.push_back(words(rng, tokens, vocab));
    secs.push_back({words(rng, 3, vocab), {i, i}});
  }
  const auto doc = doc_of(pages, "rand");
  const auto toc = toc_of(doc, secs);
  docsray::WhitespaceTokenizer tok;
  return docsray::build_index(doc, toc, chunking, fusion, tok);
}

inline docsray::ChunkingParams small_chunks() {
  docsray::ChunkingParams p;
  p.window_tokens = 12;
  p.overlap_tokens = 3;
  p.min_tail_tokens = 3;
  return p;
}

}  // namespace fixtures
