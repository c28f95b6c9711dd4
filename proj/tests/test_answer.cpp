#include <gtest/gtest.h>

#include <set>

#include "docsray/answer.hpp"
#include "docsray/error.hpp"
#include "docsray/prompts.hpp"
#include "docsray/text.hpp"
#include "support/oracles.hpp"

using namespace docsray;
namespace p = docsray::prompts;

namespace {

struct Report {
  FusionConfig fusion = fixtures::mock_fusion();
  Document doc = fixtures::doc_of(
      {"Introduction to the annual report and its purpose.",
       "The report covers the company and its divisions.",
       "Quarterly revenue growth was strong in Asia.",
       "Revenue growth in Europe slowed during the second quarter.",
       "Operating costs fell while quarterly revenue rose.",
       "Outlook for next year remains cautious.",
       "Management expects hiring to slow.",
       "Risks include currency swings and supply delays."});
  PseudoToc toc = fixtures::toc_of(
      doc, {{"Introduction", {0, 1}}, {"Financial Overview", {2, 4}}, {"Outlook", {5, 7}}});
  IndexedCorpus corpus = build_index(doc, toc, ChunkingParams{}, fusion, WhitespaceTokenizer());
};

// A word whose buckets under both mock models avoid every bucket the corpus uses.
std::string unrelated_word(const Report& r) {
  const auto& a = dynamic_cast<const MockEmbedder&>(*r.fusion.backend_a);
  const auto& b = dynamic_cast<const MockEmbedder&>(*r.fusion.backend_b);
  std::set<std::size_t> used_a, used_b;
  for (const auto& pg : r.doc.pages)
    for (const auto& w : text::words(pg.text)) {
      used_a.insert(a.bucket(w));
      used_b.insert(b.bucket(w));
    }
  for (const auto& s : r.toc.sections)
    for (const auto& w : text::words(s.title)) {
      used_a.insert(a.bucket(w));
      used_b.insert(b.bucket(w));
    }
  for (int i = 0;; ++i) {
    const auto w = "zq" + std::to_string(i);
    if (!used_a.count(a.bucket(w)) && !used_b.count(b.bucket(w))) return w;
  }
}

}  // namespace

TEST(Compose, AppendsWithColon) {
  EXPECT_EQ(compose_refined_query("What drove revenue?", "more about asia"),
            "What drove revenue?: more about asia");
  EXPECT_EQ(compose_refined_query("a: b", "c"), "a: b: c");
  EXPECT_THROW(compose_refined_query("", "x"), PreconditionError);
  EXPECT_THROW(compose_refined_query("x", ""), PreconditionError);
}

TEST(Context, HeaderPagesAreOneBasedAndBudgetHolds) {
  Report r;
  const auto res = retrieve("quarterly revenue growth", r.corpus, {}, r.fusion);
  const auto ctx = assemble_context(res.hits, r.corpus, 8000);
  EXPECT_EQ(ctx.rfind("[Financial Overview, p.3-5]\n", 0), 0u);
  EXPECT_LE(assemble_context(res.hits, r.corpus, 20).size(), 20u);
}

TEST(AnswerQuery, NoRefinementMakesOneRetrievalAndOneCall) {
  Report r;
  MockLlm llm;
  AnswerParams params;
  params.refinement_iterations = 0;
  const auto a = answer_query("quarterly revenue growth", r.corpus, params, r.fusion, llm);
  EXPECT_EQ(a.retrievals, 1u);
  EXPECT_EQ(llm.call_count(), 1u);
  EXPECT_EQ(llm.call_count(p::Kind::answer), 1u);
  EXPECT_EQ(a.refinement.final_query, "quarterly revenue growth");
  // Top hit is the Financial Overview chunk; the mock quotes its first line.
  EXPECT_EQ(a.text, "According to the document: Quarterly revenue growth was strong in Asia.");
  const auto call = llm.calls().front();
  EXPECT_EQ(call.system_prompt.value_or(""), p::kChatbotSystem);
}

TEST(AnswerQuery, TwoIterationsChainTheQuery) {
  Report r;
  MockLlm llm;
  AnswerParams params;
  params.refinement_iterations = 2;
  const auto a = answer_query("  quarterly revenue growth ", r.corpus, params, r.fusion, llm);
  EXPECT_EQ(a.retrievals, 3u);
  EXPECT_EQ(llm.call_count(p::Kind::refine), 2u);
  EXPECT_EQ(llm.call_count(p::Kind::answer), 1u);
  ASSERT_EQ(a.refinement.refined_queries.size(), 2u);
  const auto& rq = a.refinement.refined_queries;
  EXPECT_EQ(a.refinement.q0, "quarterly revenue growth");
  EXPECT_EQ(a.refinement.final_query, "quarterly revenue growth: " + rq[0] + ": " + rq[1]);
  // Every refine prompt carries q0, and the follow-ups are the mock's replies.
  std::size_t seen = 0;
  for (const auto& call : llm.calls()) {
    if (p::classify(call.user_prompt) != p::Kind::refine) continue;
    EXPECT_EQ(p::refine_query_slot(call.user_prompt), "quarterly revenue growth");
    EXPECT_EQ(MockLlm::rule_reply(call), rq[seen++]);
  }
  // The answer prompt asks the original question.
  const auto last = llm.calls().back();
  EXPECT_EQ(p::classify(last.user_prompt), p::Kind::answer);
  EXPECT_NE(last.user_prompt.find("quarterly revenue growth"), std::string::npos);
  EXPECT_EQ(last.user_prompt.find(rq[0]), std::string::npos);
}

TEST(AnswerQuery, ReferencesPointAtTheSection) {
  Report r;
  MockLlm llm;
  AnswerParams params;
  params.retrieval.k2 = 1;
  const auto a = answer_query("quarterly revenue growth", r.corpus, params, r.fusion, llm);
  ASSERT_EQ(a.references.size(), 1u);
  EXPECT_EQ(a.references[0], (Reference{"doc/s1", "Financial Overview", 2, 4}));
  EXPECT_NE(render_answer(a).find("\nReferences:\n[Financial Overview, Pages 3-5]\n"), std::string::npos);
}

TEST(AnswerQuery, UnrelatedQueryGetsTheFixedReply) {
  Report r;
  MockLlm llm;
  const auto word = unrelated_word(r);
  const auto a = answer_query(word, r.corpus, {}, r.fusion, llm);
  EXPECT_TRUE(a.no_relevant_content);
  EXPECT_EQ(a.text, kNoRelevantContent);
  EXPECT_TRUE(a.references.empty());
  EXPECT_EQ(llm.call_count(), 0u);
  EXPECT_EQ(render_answer(a), "Answer:\n" + std::string(kNoRelevantContent) + "\n");
}

TEST(AnswerQuery, EmptyFollowUpStopsRefinement) {
  Report r;
  MockLlm llm;
  llm.script(p::Kind::refine, "  \n ");
  AnswerParams params;
  params.refinement_iterations = 2;
  const auto a = answer_query("quarterly revenue growth", r.corpus, params, r.fusion, llm);
  EXPECT_TRUE(a.refinement.skipped);
  EXPECT_EQ(a.refinement.notes.size(), 1u);
  EXPECT_EQ(a.retrievals, 1u);
  EXPECT_EQ(llm.call_count(p::Kind::refine), 1u);
  EXPECT_EQ(a.refinement.final_query, "quarterly revenue growth");
  EXPECT_FALSE(a.text.empty());
}

TEST(AnswerQuery, ParameterAndBackendErrors) {
  Report r;
  MockLlm llm;
  AnswerParams params;
  params.refinement_iterations = 3;
  EXPECT_THROW(answer_query("revenue", r.corpus, params, r.fusion, llm), PreconditionError);
  params.refinement_iterations = -1;
  EXPECT_THROW(answer_query("revenue", r.corpus, params, r.fusion, llm), PreconditionError);
  params = {};
  EXPECT_THROW(answer_query("", r.corpus, params, r.fusion, llm), PreconditionError);
  llm.fail(p::Kind::answer);
  EXPECT_THROW(answer_query("revenue", r.corpus, params, r.fusion, llm), BackendError);
}

TEST(Render, ExactLayout) {
  Answer a;
  a.text = "Revenue grew 12%.";
  a.references = {{"d/s1", "Financial Overview", 2, 4}, {"d/s3", "Appendix", 9, 9}};
  EXPECT_EQ(render_answer(a),
            "Answer:\nRevenue grew 12%.\n\nReferences:\n"
            "[Financial Overview, Pages 3-5]\n[Appendix, Page 10]\n");
}

TEST(Alternatives, ThreeFiveOrNone) {
  MockLlm llm;
  auto alt = alternative_queries("tax policy", llm);
  EXPECT_EQ(alt.queries, (std::vector<std::string>{"tax policy overview", "tax policy details",
                                                   "tax policy background"}));
  EXPECT_TRUE(alt.warnings.empty());

  llm.script(p::Kind::alternative_queries, "a\nb\n\nc\nd\ne\n");
  alt = alternative_queries("tax", llm);
  EXPECT_EQ(alt.queries, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(alt.warnings.empty());

  llm.script(p::Kind::alternative_queries, "only one");
  alt = alternative_queries("tax", llm);
  EXPECT_EQ(alt.queries.size(), 1u);
  EXPECT_EQ(alt.warnings.size(), 1u);

  llm.script(p::Kind::alternative_queries, "");
  alt = alternative_queries("tax", llm);
  EXPECT_TRUE(alt.queries.empty());
  EXPECT_EQ(alt.warnings.size(), 1u);
  EXPECT_THROW(alternative_queries(" ", llm), PreconditionError);
}

TEST(Summaries, BriefAndDetailed) {
  Report r;
  MockLlm llm;
  const auto brief = summarize_document(r.corpus, SummaryMode::brief, llm);
  ASSERT_EQ(brief.sections.size(), 3u);
  EXPECT_TRUE(brief.executive_ok);
  EXPECT_EQ(llm.call_count(p::Kind::executive_summary), 1u);
  EXPECT_EQ(llm.call_count(p::Kind::section_summary_brief), 3u);
  EXPECT_EQ(brief.sections[1].summary.rfind("Summary of Financial Overview: ", 0), 0u);
  for (const auto& call : llm.calls())
    EXPECT_EQ(call.system_prompt.value_or(""), p::kDocumentAnalystSystem);

  const auto detailed = summarize_document(r.corpus, SummaryMode::detailed, llm);
  EXPECT_EQ(llm.call_count(p::Kind::section_summary_detailed), 3u);
  EXPECT_EQ(detailed.mode, SummaryMode::detailed);
  const auto text = render_summary(detailed);
  EXPECT_EQ(text.rfind("Executive summary:\n", 0), 0u);
  EXPECT_NE(text.find("\n[Financial Overview, Pages 3-5]\nSummary of Financial Overview: "),
            std::string::npos);
}

TEST(Summaries, FailuresAreMarkedNotFatal) {
  Report r;
  MockLlm llm;
  llm.fail(p::Kind::section_summary_brief);
  auto s = summarize_document(r.corpus, SummaryMode::brief, llm);
  EXPECT_TRUE(s.executive_ok);
  for (const auto& sec : s.sections) {
    EXPECT_FALSE(sec.summarized);
    EXPECT_EQ(sec.summary, kUnsummarized);
    EXPECT_FALSE(sec.note.empty());
  }
  llm.fail_all();
  s = summarize_document(r.corpus, SummaryMode::brief, llm);
  EXPECT_FALSE(s.executive_ok);
  EXPECT_EQ(s.executive, kUnsummarized);
  EXPECT_EQ(parse_summary_mode("detailed"), SummaryMode::detailed);
  EXPECT_THROW(parse_summary_mode("long"), PreconditionError);
}
