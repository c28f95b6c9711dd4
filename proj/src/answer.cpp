#include "docsray/answer.hpp"

#include <fmt/format.h>

#include "docsray/error.hpp"
#include "docsray/prompts.hpp"
#include "docsray/text.hpp"

namespace docsray {
namespace {

std::string page_range(std::size_t a, std::size_t b) {
  return a == b ? fmt::format("Page {}", a + 1) : fmt::format("Pages {}-{}", a + 1, b + 1);
}

}  // namespace

void AnswerParams::validate() const {
  retrieval.validate();
  if (refinement_iterations < 0 || refinement_iterations > kMaxRefinementIterations)
    throw PreconditionError(fmt::format("refinement iterations must be in 0..{}",
                                        kMaxRefinementIterations));
  if (context_budget == 0) throw PreconditionError("context budget must be positive");
}

std::string compose_refined_query(std::string_view q0, std::string_view refined) {
  if (q0.empty() || refined.empty())
    throw PreconditionError("both the query and its refinement must be non-empty");
  return fmt::format("{}: {}", q0, refined);
}

std::string assemble_context(const std::vector<ChunkHit>& hits, const IndexedCorpus& corpus,
                             std::size_t budget) {
  std::string out;
  for (const auto& h : hits) {
    const auto& sec = corpus.sections.at(h.section_index).section;
    std::string block = fmt::format("[{}, p.{}-{}]\n{}", sec.title, sec.page_start + 1,
                                    sec.page_end + 1, corpus.chunks.at(h.chunk_position).text);
    if (!out.empty()) out += "\n\n";
    out += block;
    if (out.size() >= budget) break;
  }
  return std::string(text::utf8_head(out, budget));
}

std::optional<std::string> refine_query(std::string_view q0, const std::vector<ChunkHit>& hits,
                                        const IndexedCorpus& corpus, const LlmBackend& llm,
                                        const AnswerParams& params) {
  if (hits.empty()) throw PreconditionError("refinement needs at least one retrieved chunk");
  LlmRequest req;
  req.user_prompt = prompts::refine(q0, assemble_context(hits, corpus, params.context_budget));
  req.sampling = params.sampling;
  const auto reply = complete(llm, req);
  const auto line = text::first_nonempty_line(reply);
  if (line.empty()) return std::nullopt;
  return std::string(line);
}

std::vector<Reference> references_for(const RetrievalResult& result, const IndexedCorpus& corpus) {
  std::vector<Reference> out;
  for (const auto& id : result.consulted_sections) {
    for (const auto& s : corpus.sections) {
      if (s.section.id != id) continue;
      out.push_back({id, s.section.title, s.section.page_start, s.section.page_end});
      break;
    }
  }
  return out;
}

Answer answer_query(std::string_view query, const IndexedCorpus& corpus, const AnswerParams& params,
                    const FusionConfig& fusion, const LlmBackend& llm) {
  params.validate();
  Answer a;
  a.refinement.q0 = std::string(text::trim(query));
  a.refinement.final_query = a.refinement.q0;

  a.retrieval = retrieve(a.refinement.q0, corpus, params.retrieval, fusion);
  ++a.retrievals;

  for (int it = 0; it < params.refinement_iterations && !a.retrieval.hits.empty(); ++it) {
    auto refined = refine_query(a.refinement.q0, a.retrieval.hits, corpus, llm, params);
    if (!refined) {
      a.refinement.skipped = true;
      a.refinement.notes.push_back(
          fmt::format("iteration {}: empty follow-up, refinement stopped", it + 1));
      break;
    }
    auto composed = compose_refined_query(a.refinement.final_query, *refined);
    auto next = retrieve(composed, corpus, params.retrieval, fusion);
    ++a.retrievals;
    a.refinement.refined_queries.push_back(std::move(*refined));
    a.refinement.final_query = std::move(composed);
    a.retrieval = std::move(next);
  }

  if (a.retrieval.hits.empty()) {
    a.text = std::string(kNoRelevantContent);
    a.no_relevant_content = true;
    return a;
  }

  LlmRequest req;
  req.system_prompt = std::string(prompts::kChatbotSystem);
  req.user_prompt = prompts::answer(assemble_context(a.retrieval.hits, corpus, params.context_budget),
                                    a.refinement.q0);
  req.sampling = params.sampling;
  a.text = std::string(text::trim(complete(llm, req)));
  a.references = references_for(a.retrieval, corpus);
  return a;
}

std::string render_answer(const Answer& answer) {
  std::string out = fmt::format("Answer:\n{}\n", answer.text);
  if (!answer.references.empty()) {
    out += "\nReferences:\n";
    for (const auto& r : answer.references)
      out += fmt::format("[{}, {}]\n", r.title, page_range(r.page_start, r.page_end));
  }
  return out;
}

AlternativeQueries alternative_queries(std::string_view query, const LlmBackend& llm,
                                       const Sampling& sampling) {
  if (text::trim(query).empty()) throw PreconditionError("query is empty");
  LlmRequest req;
  req.user_prompt = prompts::alternative_queries(text::trim(query));
  req.sampling = sampling;
  const auto reply = complete(llm, req);

  AlternativeQueries out;
  for (const auto& line : text::split_lines(reply)) {
    auto t = text::trim(line);
    if (!t.empty()) out.queries.emplace_back(t);
  }
  if (out.queries.empty()) {
    out.warnings.push_back("no alternative queries returned");
  } else if (out.queries.size() < 3) {
    out.warnings.push_back(fmt::format("only {} alternative queries returned", out.queries.size()));
  } else if (out.queries.size() > 3) {
    out.queries.resize(3);
  }
  return out;
}

std::string_view to_string(SummaryMode mode) {
  return mode == SummaryMode::detailed ? "detailed" : "brief";
}

SummaryMode parse_summary_mode(std::string_view s) {
  if (s == "brief") return SummaryMode::brief;
  if (s == "detailed") return SummaryMode::detailed;
  throw PreconditionError(fmt::format("unknown summary mode '{}'", s));
}

DocumentSummary summarize_document(const IndexedCorpus& corpus, SummaryMode mode,
                                   const LlmBackend& llm, const Sampling& sampling) {
  if (corpus.sections.empty()) throw PreconditionError("document has no sections");
  DocumentSummary out;
  out.mode = mode;

  std::vector<std::string> titles;
  for (const auto& s : corpus.sections) titles.push_back(s.section.title);
  LlmRequest exec;
  exec.system_prompt = std::string(prompts::kDocumentAnalystSystem);
  exec.user_prompt = prompts::executive_summary(titles);
  exec.sampling = sampling;
  try {
    out.executive = std::string(text::trim(complete(llm, exec)));
    out.executive_ok = !out.executive.empty();
  } catch (const BackendError&) {
    out.executive_ok = false;
  }
  if (!out.executive_ok) out.executive = std::string(kUnsummarized);

  for (const auto& s : corpus.sections) {
    SectionSummary ss;
    ss.section_id = s.section.id;
    ss.title = s.section.title;
    ss.page_start = s.section.page_start;
    ss.page_end = s.section.page_end;
    if (text::trim(s.text).empty()) {
      ss.note = "section has no text";
    } else {
      LlmRequest req;
      req.system_prompt = std::string(prompts::kDocumentAnalystSystem);
      req.user_prompt = mode == SummaryMode::brief
                            ? prompts::section_summary_brief(s.section.title, s.text)
                            : prompts::section_summary_detailed(s.section.title, s.text);
      req.sampling = sampling;
      try {
        ss.summary = std::string(text::trim(complete(llm, req)));
        ss.summarized = !ss.summary.empty();
        if (!ss.summarized) ss.note = "empty reply";
      } catch (const BackendError& e) {
        ss.note = e.what();
      }
    }
    if (!ss.summarized) ss.summary = std::string(kUnsummarized);
    out.sections.push_back(std::move(ss));
  }
  return out;
}

std::string render_summary(const DocumentSummary& summary) {
  std::string out = fmt::format("Executive summary:\n{}\n", summary.executive);
  for (const auto& s : summary.sections)
    out += fmt::format("\n[{}, {}]\n{}\n", s.title, page_range(s.page_start, s.page_end), s.summary);
  return out;
}

}  // namespace docsray
