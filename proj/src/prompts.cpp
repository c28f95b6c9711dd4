#include "docsray/prompts.hpp"

#include <fmt/format.h>

#include "docsray/text.hpp"

namespace docsray::prompts {
namespace {

constexpr std::string_view kBoundaryHead =
    "Below are short excerpts from two consecutive pages.\n"
    "If both excerpts discuss the same topic, reply with '0'. \n"
    "If the second excerpt introduces a new topic, reply with '1'. \n"
    "Reply with a single character only.\n"
    "\n"
    "[Page A]\n";
constexpr std::string_view kBoundaryMid = "\n\n[Page B]\n";

constexpr std::string_view kTitleHead =
    "Here is a passage from the document.\n"
    "Please propose ONE concise title that captures its main topic.\n"
    "\n";
constexpr std::string_view kTitleTail =
    "\n\nReturn ONLY the title text, without any additional commentary or formatting.";

constexpr std::string_view kRefineHead = "The user question is: ";
constexpr std::string_view kRefineMid = "\n\nThe retrieved chunks are:\n";
constexpr std::string_view kRefineTail =
    "\n\nWrite ONE concise follow-up question that would help retrieve even more relevant "
    "information.\n"
    "Return ONLY the question text. Do not include any additional text or explanations.";

constexpr std::string_view kAltHead = "Given the search query: \"";
constexpr std::string_view kAltTail =
    "\"\n\nGenerate 3 alternative search queries that might find relevant documents. \n"
    "Consider synonyms, related terms, and different phrasings.\n"
    "Return only the queries, one per line.\n"
    "\n"
    "Alternative queries:";

constexpr std::string_view kExecHead = "Based on a document with these sections: ";
constexpr std::string_view kExecTail =
    "\n\nProvide a brief executive summary (2-3 paragraphs) highlighting the main theme and key "
    "findings.";

constexpr std::string_view kBriefHead = "Summarize this section \"";
constexpr std::string_view kBriefMid = "\" in 2-3 sentences:\n";
constexpr std::string_view kBriefTail = "\n\nSummary:";

constexpr std::string_view kDetailedHead = "Based on the following content from section \"";
constexpr std::string_view kDetailedMid =
    "\", provide a concise summary \n"
    "highlighting the main points, key arguments, and important details:\n\n";
constexpr std::string_view kDetailedTail = "\n\nSummary (2-3 paragraphs):";

constexpr std::string_view kMultiImageHead = "Describe these ";
constexpr std::string_view kMultiImageTail =
    " visual elements in order:\n"
    "\n"
    "Figure 1: [description]\n"
    "Figure 2: [description]\n"
    "...\n"
    "Figure N: [description]\n"
    "\n"
    "For each figure, identify if it's a chart/graph/diagram (and what data it shows) or a "
    "photo/illustration (and what it depicts). Start immediately with \"Figure 1:\".";

constexpr std::string_view kAnswerHead = "Document context:\n";
constexpr std::string_view kAnswerMid = "\n\nQuestion: ";
constexpr std::string_view kAnswerTail =
    "\n\nAnswer the question using the document context above.";

std::string cat(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (auto p : parts) out.append(p);
  return out;
}

bool contains(std::string_view s, std::string_view needle) {
  return s.find(needle) != std::string_view::npos;
}

}  // namespace

std::string multi_image(std::size_t n) {
  return cat({kMultiImageHead, std::to_string(n), kMultiImageTail});
}

std::string boundary(std::string_view first_page_text, std::string_view second_page_text) {
  return cat({kBoundaryHead, first_page_text, kBoundaryMid, second_page_text});
}

std::string title(std::string_view section_sample) {
  return cat({kTitleHead, section_sample, kTitleTail});
}

std::string refine(std::string_view query, std::string_view combined_answer) {
  return cat({kRefineHead, query, kRefineMid, combined_answer, kRefineTail});
}

std::string alternative_queries(std::string_view query) { return cat({kAltHead, query, kAltTail}); }

std::string executive_summary(const std::vector<std::string>& section_titles) {
  return cat({kExecHead, text::join(section_titles, ", "), kExecTail});
}

std::string section_summary_brief(std::string_view title, std::string_view combined_content) {
  return cat({kBriefHead, title, kBriefMid, text::utf8_head(combined_content, 1500), kBriefTail});
}

std::string section_summary_detailed(std::string_view title, std::string_view combined_content) {
  return cat({kDetailedHead, title, kDetailedMid, combined_content, kDetailedTail});
}

std::string answer(std::string_view context, std::string_view question) {
  return cat({kAnswerHead, context, kAnswerMid, question, kAnswerTail});
}

Kind classify(std::string_view p) {
  if (text::starts_with(p, kBoundaryHead)) return Kind::boundary;
  if (text::starts_with(p, kTitleHead)) return Kind::title;
  if (text::starts_with(p, kRefineHead) && contains(p, "Write ONE concise follow-up question"))
    return Kind::refine;
  if (text::starts_with(p, kAltHead)) return Kind::alternative_queries;
  if (text::starts_with(p, kExecHead)) return Kind::executive_summary;
  if (text::starts_with(p, kBriefHead)) return Kind::section_summary_brief;
  if (text::starts_with(p, kDetailedHead)) return Kind::section_summary_detailed;
  if (text::starts_with(p, kMultiImageHead) && contains(p, "visual elements in order"))
    return Kind::multi_image;
  if (p == kSingleImage) return Kind::single_image;
  if (p == kOcr) return Kind::ocr;
  if (text::starts_with(p, kAnswerHead)) return Kind::answer;
  return Kind::unknown;
}

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::single_image: return "single_image";
    case Kind::multi_image: return "multi_image";
    case Kind::ocr: return "ocr";
    case Kind::boundary: return "boundary";
    case Kind::title: return "title";
    case Kind::refine: return "refine";
    case Kind::alternative_queries: return "alternative_queries";
    case Kind::executive_summary: return "executive_summary";
    case Kind::section_summary_brief: return "section_summary_brief";
    case Kind::section_summary_detailed: return "section_summary_detailed";
    case Kind::answer: return "answer";
    case Kind::unknown: break;
  }
  return "unknown";
}

std::string_view boundary_page_a(std::string_view prompt) {
  return text::between(prompt, kBoundaryHead, kBoundaryMid);
}

std::string_view boundary_page_b(std::string_view prompt) {
  auto pos = prompt.find(kBoundaryMid);
  if (pos == std::string_view::npos) return {};
  return prompt.substr(pos + kBoundaryMid.size());
}

std::string_view title_sample(std::string_view prompt) {
  if (!text::starts_with(prompt, kTitleHead)) return {};
  auto body = prompt.substr(kTitleHead.size());
  auto end = body.rfind(kTitleTail);
  return end == std::string_view::npos ? body : body.substr(0, end);
}

std::string_view refine_query_slot(std::string_view prompt) {
  return text::between(prompt, kRefineHead, kRefineMid);
}

std::string_view refine_context_slot(std::string_view prompt) {
  auto pos = prompt.find(kRefineMid);
  if (pos == std::string_view::npos) return {};
  auto body = prompt.substr(pos + kRefineMid.size());
  auto end = body.rfind(kRefineTail);
  return end == std::string_view::npos ? body : body.substr(0, end);
}

std::string_view alternative_query_slot(std::string_view prompt) {
  if (!text::starts_with(prompt, kAltHead)) return {};
  auto body = prompt.substr(kAltHead.size());
  auto end = body.rfind(kAltTail);
  return end == std::string_view::npos ? body : body.substr(0, end);
}

std::string_view summary_title_slot(std::string_view prompt) {
  if (text::starts_with(prompt, kBriefHead)) return text::between(prompt, kBriefHead, kBriefMid);
  if (text::starts_with(prompt, kDetailedHead))
    return text::between(prompt, kDetailedHead, kDetailedMid);
  return {};
}

std::string_view summary_content_slot(std::string_view prompt) {
  std::string_view mid;
  std::string_view tail;
  if (text::starts_with(prompt, kBriefHead)) {
    mid = kBriefMid;
    tail = kBriefTail;
  } else if (text::starts_with(prompt, kDetailedHead)) {
    mid = kDetailedMid;
    tail = kDetailedTail;
  } else {
    return {};
  }
  auto pos = prompt.find(mid);
  if (pos == std::string_view::npos) return {};
  auto body = prompt.substr(pos + mid.size());
  auto end = body.rfind(tail);
  return end == std::string_view::npos ? body : body.substr(0, end);
}

std::string_view answer_context_slot(std::string_view prompt) {
  if (!text::starts_with(prompt, kAnswerHead)) return {};
  auto body = prompt.substr(kAnswerHead.size());
  auto end = body.rfind(kAnswerMid);
  return end == std::string_view::npos ? body : body.substr(0, end);
}

}  // namespace docsray::prompts
