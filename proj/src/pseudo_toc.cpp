#include "docsray/pseudo_toc.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include <fmt/format.h>
#include <json.hpp>

#include "docsray/error.hpp"
#include "docsray/prompts.hpp"
#include "docsray/text.hpp"

namespace docsray {
namespace {

void renumber(const Document& doc, std::vector<Section>& sections) {
  for (std::size_t i = 0; i < sections.size(); ++i) {
    sections[i].index = i;
    sections[i].id = make_section_id(doc.doc_id, i);
  }
}

}  // namespace

void SegmentationParams::validate() const {
  if (initial_chunk_pages < 1) throw PreconditionError("segmentation: k must be >= 1");
  if (min_pages < 1) throw PreconditionError("segmentation: m must be >= 1");
  if (min_pages > max_pages) throw PreconditionError("segmentation: m must not exceed M");
  if (excerpt_chars == 0) throw PreconditionError("segmentation: excerpt_chars must be positive");
}

SegmentationResult initial_segmentation(const Document& doc, const SegmentationParams& params,
                                        const LlmBackend& llm) {
  doc.validate();
  params.validate();
  SegmentationResult out;
  const std::size_t n = doc.pages.size();
  const std::size_t k = params.initial_chunk_pages;
  const std::size_t chunks = (n + k - 1) / k;

  for (std::size_t i = 1; i < chunks; ++i) {
    const auto earlier = doc.text_of((i - 1) * k, i * k - 1);
    const auto later = doc.text_of(i * k, std::min(n, (i + 1) * k) - 1);
    LlmRequest req;
    req.user_prompt = prompts::boundary(text::utf8_tail(earlier, params.excerpt_chars),
                                        text::utf8_head(later, params.excerpt_chars));
    const auto reply = std::string(text::trim(complete(llm, req)));
    ++out.llm_calls;
    if (reply == "1") {
      out.boundaries.boundaries.push_back(i * k);
    } else if (reply != "0") {
      out.warnings.push_back(fmt::format(
          "boundary check before page {}: unexpected reply '{}', treated as no boundary", i * k,
          text::utf8_head(reply, 40)));
    }
  }
  return out;
}

std::vector<Section> sections_from_boundaries(const Document& doc, const BoundarySet& set) {
  const auto& b = set.boundaries;
  const std::size_t n = doc.pages.size();
  if (b.empty() || b.front() != 0) throw PreconditionError("boundaries must start at page 0");
  for (std::size_t i = 1; i < b.size(); ++i)
    if (b[i] <= b[i - 1]) throw PreconditionError("boundaries must be strictly increasing");
  if (b.back() >= n) throw PreconditionError("boundary beyond the last page");

  std::vector<Section> out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    Section s;
    s.page_start = b[i];
    s.page_end = (i + 1 < b.size() ? b[i + 1] : n) - 1;
    out.push_back(std::move(s));
  }
  renumber(doc, out);
  return out;
}

std::vector<Section> merge_small_sections(const Document& doc, std::vector<Section> sections,
                                          const SegmentationParams& params,
                                          const FusionConfig& fusion) {
  params.validate();
  check_partition(sections, doc.pages.size());

  std::map<std::pair<std::size_t, std::size_t>, std::optional<DualEmbedding>> cache;
  auto embedding_of = [&](const Section& s) -> const std::optional<DualEmbedding>& {
    auto key = std::make_pair(s.page_start, s.page_end);
    auto it = cache.find(key);
    if (it == cache.end()) {
      const auto body = doc.text_of(s.page_start, s.page_end);
      std::optional<DualEmbedding> e;
      if (!text::trim(body).empty()) e = embed_text(body, fusion);
      it = cache.emplace(key, std::move(e)).first;
    }
    return it->second;
  };
  // Sections without text compare below any real similarity.
  auto similarity = [&](const Section& a, const Section& b) {
    const auto& ea = embedding_of(a);
    const auto& eb = embedding_of(b);
    if (!ea || !eb) return -2.0;
    return cosine(*ea, *eb);
  };

  while (sections.size() > 1) {
    auto small = std::find_if(sections.begin(), sections.end(), [&](const Section& s) {
      return s.page_count() < params.min_pages;
    });
    if (small == sections.end()) break;
    const std::size_t i = static_cast<std::size_t>(small - sections.begin());

    bool into_prev;
    if (i == 0) {
      into_prev = false;
    } else if (i + 1 == sections.size()) {
      into_prev = true;
    } else {
      const double sim_prev = similarity(sections[i], sections[i - 1]);
      const double sim_next = similarity(sections[i], sections[i + 1]);
      into_prev = sim_prev > sim_next;
    }
    if (into_prev) {
      sections[i - 1].page_end = sections[i].page_end;
      sections.erase(sections.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      sections[i + 1].page_start = sections[i].page_start;
      sections.erase(sections.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  renumber(doc, sections);
  return sections;
}

std::string fallback_title(const Section& s) {
  return fmt::format("Section {} (pages {}–{})", s.index + 1, s.page_start + 1, s.page_end + 1);
}

TitleResult generate_titles(const Document& doc, std::vector<Section> sections,
                            const LlmBackend& llm, const SegmentationParams& params) {
  check_partition(sections, doc.pages.size());
  TitleResult out;
  for (auto& s : sections) {
    const auto body = doc.text_of(s.page_start, s.page_end);
    const auto sample = text::utf8_head(body, params.title_sample_chars);
    std::string title;
    if (!text::trim(sample).empty()) {
      LlmRequest req;
      req.user_prompt = prompts::title(sample);
      title = std::string(text::first_nonempty_line(complete(llm, req)));
    }
    if (title.empty()) {
      title = fallback_title(s);
      out.warnings.push_back(fmt::format("section {}: no title generated, using fallback", s.index));
    }
    s.title = std::move(title);
  }
  out.sections = std::move(sections);
  return out;
}

PseudoToc build_pseudo_toc(const Document& doc, const SegmentationParams& params,
                           const LlmBackend& llm, const FusionConfig& fusion) {
  doc.validate();
  params.validate();
  PseudoToc toc;
  toc.doc_id = doc.doc_id;
  toc.page_count = doc.pages.size();
  toc.params = params;
  toc.llm_id = llm.id();

  auto phase1 = initial_segmentation(doc, params, llm);
  toc.warnings = std::move(phase1.warnings);
  auto sections = sections_from_boundaries(doc, phase1.boundaries);
  sections = merge_small_sections(doc, std::move(sections), params, fusion);
  auto titled = generate_titles(doc, std::move(sections), llm, params);
  toc.warnings.insert(toc.warnings.end(), titled.warnings.begin(), titled.warnings.end());
  toc.sections = std::move(titled.sections);
  check_partition(toc.sections, toc.page_count);
  toc.generated_at = std::chrono::system_clock::now();
  return toc;
}

std::string export_toc_json(const PseudoToc& toc) {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& s : toc.sections) {
    records.push_back({{"section_id", s.id},
                       {"title", s.title},
                       {"page_start", s.page_start},
                       {"page_end", s.page_end}});
  }
  nlohmann::ordered_json root = {{"doc_id", toc.doc_id},
                                 {"page_count", toc.page_count},
                                 {"generated_by", toc.llm_id},
                                 {"sections", records}};
  return root.dump(2);
}

std::string format_toc_table(const std::vector<Section>& sections) {
  std::size_t width = 5;
  for (const auto& s : sections) width = std::max(width, s.title.size());
  std::string out = fmt::format("{:<4} {:<{}} {}\n", "#", "Title", width, "Pages");
  for (const auto& s : sections)
    out += fmt::format("{:<4} {:<{}} {}-{}\n", s.index + 1, s.title, width, s.page_start + 1,
                       s.page_end + 1);
  return out;
}

}  // namespace docsray
