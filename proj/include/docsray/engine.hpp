#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docsray/answer.hpp"
#include "docsray/chunk_index.hpp"
#include "docsray/config.hpp"
#include "docsray/ingestion.hpp"
#include "docsray/pseudo_toc.hpp"

namespace docsray {

enum class InputFormat { text, paged_layout };

InputFormat parse_input_format(std::string_view s);

struct IngestResult {
  Document document;
  PseudoToc toc;
  IndexedCorpus corpus;
  std::vector<std::string> warnings;
};

struct QueryOptions {
  std::optional<RetrievalMode> mode;
  std::optional<int> iterations;
};

// Backends plus configuration: the pipeline the CLI and the service share.
class Engine {
 public:
  explicit Engine(EngineConfig config);
  // Injected backends, for tests and fault injection.
  Engine(EngineConfig config, std::shared_ptr<LlmBackend> llm, FusionConfig fusion);

  const EngineConfig& config() const { return config_; }
  const LlmBackend& llm() const { return *llm_; }
  const FusionConfig& fusion() const { return fusion_; }
  const Tokenizer& tokenizer() const { return *tokenizer_; }
  IndexFingerprints fingerprints() const;

  IngestResult ingest_document(Document doc) const;
  IngestResult ingest_text(std::string doc_id, std::string_view text) const;
  IngestResult ingest_pages(std::string doc_id, std::span<const RawPage> pages) const;
  IngestResult ingest_file(const std::filesystem::path& path, InputFormat format,
                           std::optional<std::string> doc_id = std::nullopt) const;

  AnswerParams answer_params(const QueryOptions& options = {}) const;
  Answer ask(const IndexedCorpus& corpus, std::string_view question,
             const QueryOptions& options = {}) const;
  DocumentSummary summarize(const IndexedCorpus& corpus, SummaryMode mode) const;

 private:
  EngineConfig config_;
  std::shared_ptr<LlmBackend> llm_;
  FusionConfig fusion_;
  std::shared_ptr<const Tokenizer> tokenizer_;
};

FusionConfig make_fusion(const EngineConfig& config);

// File stem reduced to [A-Za-z0-9._-]; "document" if nothing is left.
std::string doc_id_from_path(const std::filesystem::path& path);

// Synthetic corpus with `sections` sections of exactly `chunks_per_section`
// chunks each, built through the regular index pipeline. Section i draws its
// vocabulary from topic words "t{i}w{n}", so a query naming a topic's words
// lands in that section.
struct SyntheticSpec {
  std::size_t sections = 20;
  std::size_t chunks_per_section = 50;
  std::size_t pages_per_section = 3;
  std::uint32_t seed = 7;
  std::string doc_id = "synthetic";
};

IngestResult build_synthetic_corpus(const SyntheticSpec& spec, const EngineConfig& config,
                                    const FusionConfig& fusion);

// Tokens a section needs so the chunker yields exactly `chunks` windows.
std::size_t synthetic_section_tokens(std::size_t chunks, const ChunkingParams& params);

}  // namespace docsray
