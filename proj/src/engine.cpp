#include "docsray/engine.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "docsray/error.hpp"

namespace docsray {

InputFormat parse_input_format(std::string_view s) {
  if (s == "text") return InputFormat::text;
  if (s == "paged-layout" || s == "paged_layout") return InputFormat::paged_layout;
  throw PreconditionError(fmt::format("unknown input format '{}'", s));
}

FusionConfig make_fusion(const EngineConfig& config) {
  FusionConfig f;
  f.mode = config.fusion_mode;
  f.prenormalize = config.prenormalize;
  f.backend_a = make_embedder(config.embedder_a);
  f.backend_b = make_embedder(config.embedder_b);
  f.validate();
  return f;
}

Engine::Engine(EngineConfig config)
    : Engine(config, make_llm(config.llm), make_fusion(config)) {}

Engine::Engine(EngineConfig config, std::shared_ptr<LlmBackend> llm, FusionConfig fusion)
    : config_(std::move(config)),
      llm_(std::move(llm)),
      fusion_(std::move(fusion)),
      tokenizer_(make_tokenizer(config_.tokenizer)) {
  config_.validate();
  fusion_.validate();
  if (!llm_) throw PreconditionError("engine needs an LLM backend");
}

IndexFingerprints Engine::fingerprints() const {
  return current_fingerprints(*tokenizer_, fusion_, config_.chunking);
}

IngestResult Engine::ingest_document(Document doc) const {
  IngestResult r;
  r.toc = build_pseudo_toc(doc, config_.segmentation, *llm_, fusion_);
  r.warnings.insert(r.warnings.end(), r.toc.warnings.begin(), r.toc.warnings.end());
  r.corpus = build_index(doc, r.toc, config_.chunking, fusion_, *tokenizer_);
  r.document = std::move(doc);
  return r;
}

IngestResult Engine::ingest_text(std::string doc_id, std::string_view text) const {
  return ingest_document(load_plain_text(std::move(doc_id), text));
}

IngestResult Engine::ingest_pages(std::string doc_id, std::span<const RawPage> pages) const {
  auto assembled = assemble_document(std::move(doc_id), pages, *llm_);
  auto r = ingest_document(std::move(assembled.document));
  r.warnings.insert(r.warnings.begin(), assembled.warnings.begin(), assembled.warnings.end());
  return r;
}

IngestResult Engine::ingest_file(const std::filesystem::path& path, InputFormat format,
                                 std::optional<std::string> doc_id) const {
  const std::string id = doc_id ? *doc_id : doc_id_from_path(path);
  if (format == InputFormat::paged_layout) {
    const auto pages = load_paged_layout(path);
    return ingest_pages(id, pages);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ingest_text(id, ss.str());
}

AnswerParams Engine::answer_params(const QueryOptions& options) const {
  auto p = config_.answer_params();
  if (options.mode) p.retrieval.mode = *options.mode;
  if (options.iterations) p.refinement_iterations = *options.iterations;
  p.validate();
  return p;
}

Answer Engine::ask(const IndexedCorpus& corpus, std::string_view question,
                   const QueryOptions& options) const {
  return answer_query(question, corpus, answer_params(options), fusion_, *llm_);
}

DocumentSummary Engine::summarize(const IndexedCorpus& corpus, SummaryMode mode) const {
  return summarize_document(corpus, mode, *llm_, config_.sampling);
}

std::string doc_id_from_path(const std::filesystem::path& path) {
  std::string out;
  for (char ch : path.stem().string()) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '.' || ch == '_' || ch == '-';
    out.push_back(ok ? ch : '_');
  }
  if (out.empty() || out.find_first_not_of('_') == std::string::npos) return "document";
  return out;
}

std::size_t synthetic_section_tokens(std::size_t chunks, const ChunkingParams& params) {
  if (chunks == 0) throw PreconditionError("synthetic sections need at least one chunk");
  return (chunks - 1) * params.stride() + params.window_tokens;
}

IngestResult build_synthetic_corpus(const SyntheticSpec& spec, const EngineConfig& config,
                                    const FusionConfig& fusion) {
  if (spec.sections == 0 || spec.pages_per_section == 0)
    throw PreconditionError("synthetic corpus needs sections and pages");
  constexpr std::size_t kTopicWords = 40;
  constexpr std::size_t kSharedWords = 200;
  std::mt19937 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> topic_word(0, kTopicWords - 1);
  std::uniform_int_distribution<std::size_t> shared_word(0, kSharedWords - 1);
  std::bernoulli_distribution on_topic(0.5);

  const std::size_t tokens = synthetic_section_tokens(spec.chunks_per_section, config.chunking);
  IngestResult r;
  r.document.doc_id = spec.doc_id;
  r.document.source_kind = SourceKind::plain_text;
  r.toc.doc_id = spec.doc_id;
  r.toc.params = config.segmentation;
  r.toc.llm_id = "synthetic";

  for (std::size_t s = 0; s < spec.sections; ++s) {
    const std::size_t first_page = r.document.pages.size();
    for (std::size_t p = 0; p < spec.pages_per_section; ++p) {
      // Spread the section's tokens evenly; earlier pages take the remainder.
      const std::size_t n = tokens / spec.pages_per_section + (p < tokens % spec.pages_per_section);
      std::string text;
      for (std::size_t w = 0; w < n; ++w) {
        if (w) text += ' ';
        text += on_topic(rng) ? fmt::format("t{}w{}", s, topic_word(rng))
                              : fmt::format("common{}", shared_word(rng));
      }
      r.document.pages.push_back({r.document.pages.size(), std::move(text), {}, false});
    }
    Section sec;
    sec.index = s;
    sec.id = make_section_id(spec.doc_id, s);
    sec.title = fmt::format("Topic {} t{}w0 t{}w1", s + 1, s, s);
    sec.page_start = first_page;
    sec.page_end = r.document.pages.size() - 1;
    r.toc.sections.push_back(std::move(sec));
  }
  r.toc.page_count = r.document.pages.size();
  auto tokenizer = make_tokenizer(config.tokenizer);
  r.corpus = build_index(r.document, r.toc, config.chunking, fusion, *tokenizer);
  return r;
}

}  // namespace docsray
