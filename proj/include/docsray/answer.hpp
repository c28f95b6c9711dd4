#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docsray/chunk_index.hpp"
#include "docsray/fusion.hpp"
#include "docsray/providers.hpp"
#include "docsray/retrieval.hpp"

namespace docsray {

inline constexpr int kMaxRefinementIterations = 2;
inline constexpr std::string_view kNoRelevantContent =
    "No relevant content was found in the document for this question.";

struct AnswerParams {
  RetrievalParams retrieval;
  int refinement_iterations = 1;  // 0..2
  std::size_t context_budget = 8000;  // characters of hit text sent to the LLM
  Sampling sampling;

  void validate() const;
};

struct RefinementState {
  std::string q0;
  std::vector<std::string> refined_queries;  // raw LLM follow-ups, at most 2
  std::string final_query;
  bool skipped = false;  // an iteration produced no usable follow-up
  std::vector<std::string> notes;
};

// Section-level source; pages are 0-based like everywhere else internally.
struct Reference {
  std::string section_id;
  std::string title;
  std::size_t page_start = 0;
  std::size_t page_end = 0;

  bool operator==(const Reference&) const = default;
};

struct Answer {
  std::string text;
  std::vector<Reference> references;
  RetrievalResult retrieval;  // the final retrieval
  RefinementState refinement;
  std::size_t retrievals = 0;
  bool no_relevant_content = false;
};

// q0 + ": " + refined.
std::string compose_refined_query(std::string_view q0, std::string_view refined);

// Hits in rank order, each prefixed "[{title}, p.{a}-{b}]" with 1-based
// pages, separated by blank lines and clipped to `budget` characters.
std::string assemble_context(const std::vector<ChunkHit>& hits, const IndexedCorpus& corpus,
                             std::size_t budget);

// First non-empty line of the reply, trimmed; nullopt if the reply is blank.
std::optional<std::string> refine_query(std::string_view q0, const std::vector<ChunkHit>& hits,
                                        const IndexedCorpus& corpus, const LlmBackend& llm,
                                        const AnswerParams& params = {});

// One reference per consulted section, in first-appearance order.
std::vector<Reference> references_for(const RetrievalResult& result, const IndexedCorpus& corpus);

Answer answer_query(std::string_view query, const IndexedCorpus& corpus, const AnswerParams& params,
                    const FusionConfig& fusion, const LlmBackend& llm);

// "Answer:\n{text}\n\nReferences:\n[{title}, Pages {a}-{b}]..." with 1-based
// pages; a one-page section prints "Page {a}". No block without references.
std::string render_answer(const Answer& answer);

struct AlternativeQueries {
  std::vector<std::string> queries;
  std::vector<std::string> warnings;
};

AlternativeQueries alternative_queries(std::string_view query, const LlmBackend& llm,
                                       const Sampling& sampling = {});

enum class SummaryMode { brief, detailed };

std::string_view to_string(SummaryMode mode);
SummaryMode parse_summary_mode(std::string_view s);

struct SectionSummary {
  std::string section_id;
  std::string title;
  std::size_t page_start = 0;
  std::size_t page_end = 0;
  std::string summary;
  bool summarized = false;
  std::string note;  // why the section has no summary
};

struct DocumentSummary {
  SummaryMode mode = SummaryMode::brief;
  std::string executive;
  bool executive_ok = false;
  std::vector<SectionSummary> sections;
};

inline constexpr std::string_view kUnsummarized = "[summary unavailable]";

// Executive summary from the section titles, then one summary per section.
// A failing or empty per-section call marks that section and moves on.
DocumentSummary summarize_document(const IndexedCorpus& corpus, SummaryMode mode,
                                   const LlmBackend& llm, const Sampling& sampling = {});

std::string render_summary(const DocumentSummary& summary);

}  // namespace docsray
